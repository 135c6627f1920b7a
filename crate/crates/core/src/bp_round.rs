//! Rounding of the big-item substream into a high-multiplicity instance.
//!
//! Two schemes are available:
//!
//! * [`RoundingMode::Simple`] keeps one quantile summary with `δ = ε²/4`.
//! * [`RoundingMode::Geometric`] splits big items into `k = ⌈log₂(1/ε)⌉`
//!   groups, group `j` holding sizes in `(2^(−j−1), 2^(−j)]`, each with its own
//!   summary at `δ = ε/8`.
//!
//! In both cases a summary with extracted pairs `(a_1, u_1), …, (a_q, u_q)`
//! becomes `u_{j+1} − u_j` items of size `a_j` plus one item of size `a_q`.
//! Since `u_j` bounds the rank of `a_j` from above, the `i`-th largest rounded
//! item is never smaller than the `i`-th largest original item, and both
//! instances hold the same number of items.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::numeric::{power_bucket, CompensatedSum};
use crate::quantiles::GkSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItemClass {
    Small,
    Big,
}

/// Items of size at most `ε` are small.
pub fn classify_item(size: f64, epsilon: f64) -> Result<ItemClass> {
    check_item_size(size)?;
    Ok(if size > epsilon { ItemClass::Big } else { ItemClass::Small })
}

pub(crate) fn check_item_size(size: f64) -> Result<()> {
    check_finite(size, "item size")?;
    if size > 0.0 && size <= 1.0 {
        Ok(())
    } else {
        Err(Error::RejectedInput(format!("item size must lie in (0, 1], got {size}")))
    }
}

pub(crate) fn check_bp_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 / 3.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must lie in (0, 1/3], got {epsilon}")))
    }
}

/// `⌈log₂(1/ε)⌉`.
pub fn group_count(epsilon: f64) -> usize {
    let k = (1.0 / epsilon).log2().ceil();
    // 1/ε can land a hair above a power of two.
    let k = if 2f64.powi(k as i32 - 1) * epsilon >= 1.0 - 1e-12 { k - 1.0 } else { k };
    (k.max(1.0)) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    Simple,
    #[default]
    Geometric,
}

impl RoundingMode {
    pub fn label(self) -> &'static str {
        match self {
            RoundingMode::Simple => "simple",
            RoundingMode::Geometric => "geometric",
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RoundingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(RoundingMode::Simple),
            "geometric" => Ok(RoundingMode::Geometric),
            other => Err(Error::Config(format!("unknown rounding mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeClass {
    pub size: f64,
    pub multiplicity: u64,
}

/// High-multiplicity bin packing instance: distinct sizes with multiplicities,
/// sorted by size non-increasingly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundedInstance {
    entries: Vec<SizeClass>,
    total_items: u64,
    total_size: f64,
}

impl RoundedInstance {
    /// Builds an instance from arbitrary `(size, multiplicity)` pairs; equal
    /// sizes are merged and zero multiplicities dropped.
    pub fn from_pairs<I: IntoIterator<Item = (f64, u64)>>(pairs: I) -> Result<Self> {
        let mut entries: Vec<SizeClass> = Vec::new();
        for (size, multiplicity) in pairs {
            check_finite(size, "item size")?;
            if size <= 0.0 {
                return Err(Error::RejectedInput(format!("item size must be positive, got {size}")));
            }
            if multiplicity > 0 {
                entries.push(SizeClass { size, multiplicity });
            }
        }
        entries.sort_by(|a, b| b.size.total_cmp(&a.size));
        entries.dedup_by(|later, kept| {
            if later.size == kept.size {
                kept.multiplicity += later.multiplicity;
                true
            } else {
                false
            }
        });
        let total_items = entries.iter().map(|e| e.multiplicity).sum();
        let mut total = CompensatedSum::default();
        for e in &entries {
            total.add(e.size * e.multiplicity as f64);
        }
        Ok(Self { entries, total_items, total_size: total.value() })
    }

    /// One entry per item.
    pub fn from_items(items: &[f64]) -> Result<Self> {
        Self::from_pairs(items.iter().map(|&s| (s, 1)))
    }

    pub fn entries(&self) -> &[SizeClass] {
        &self.entries
    }

    /// Number of distinct sizes `σ`.
    pub fn sigma(&self) -> usize {
        self.entries.len()
    }

    pub fn total_items(&self) -> u64 {
        self.total_items
    }

    pub fn total_size(&self) -> f64 {
        self.total_size
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All items, largest first.
    pub fn expand(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_items as usize);
        for e in &self.entries {
            out.extend(std::iter::repeat_n(e.size, e.multiplicity as usize));
        }
        out
    }

    /// Union of two instances.
    pub fn union(&self, other: &RoundedInstance) -> RoundedInstance {
        let pairs = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .map(|e| (e.size, e.multiplicity));
        RoundedInstance::from_pairs(pairs).expect("entries of valid instances are valid")
    }

    pub(crate) fn from_summary(summary: &GkSummary) -> RoundedInstance {
        let mut summary = summary.clone();
        summary.compress();
        let pairs = match summary.extract() {
            Ok(pairs) => pairs,
            Err(_) => return RoundedInstance::default(),
        };
        let mut out = Vec::with_capacity(pairs.len());
        for (j, &(value, upper)) in pairs.iter().enumerate() {
            let multiplicity = match pairs.get(j + 1) {
                Some(&(_, next_upper)) => next_upper - upper,
                None => 1,
            };
            out.push((value, multiplicity));
        }
        RoundedInstance::from_pairs(out).expect("summary values are valid sizes")
    }
}

/// Streaming rounder for the big-item substream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupedRounder {
    epsilon: f64,
    mode: RoundingMode,
    k: usize,
    groups: Vec<GkSummary>,
}

impl GroupedRounder {
    pub fn new(epsilon: f64, mode: RoundingMode) -> Result<Self> {
        check_bp_epsilon(epsilon)?;
        let k = group_count(epsilon);
        let groups = match mode {
            RoundingMode::Simple => vec![GkSummary::new(epsilon * epsilon / 4.0)?],
            RoundingMode::Geometric => {
                (0..k).map(|_| GkSummary::new(epsilon / 8.0)).collect::<Result<_>>()?
            }
        };
        Ok(Self { epsilon, mode, k, groups })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode(&self) -> RoundingMode {
        self.mode
    }

    /// `k = ⌈log₂(1/ε)⌉`, the additive term of the rounding guarantee.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Geometric group of a big item: `j` with `size ∈ (2^(−j−1), 2^(−j)]`,
    /// clamped to `[0, k−1]`.
    pub fn group_of(&self, size: f64) -> usize {
        let j = -power_bucket(size, 2.0) - 1;
        j.clamp(0, self.k as i64 - 1) as usize
    }

    pub fn insert(&mut self, size: f64) -> Result<()> {
        check_item_size(size)?;
        if size <= self.epsilon {
            return Err(Error::RejectedInput(format!(
                "item of size {size} is not big for epsilon {}",
                self.epsilon
            )));
        }
        let g = match self.mode {
            RoundingMode::Simple => 0,
            RoundingMode::Geometric => self.group_of(size),
        };
        self.groups[g].insert(size)
    }

    pub fn summaries(&self) -> &[GkSummary] {
        &self.groups
    }

    /// Items per summary (`N_j`).
    pub fn group_counts(&self) -> Vec<u64> {
        self.groups.iter().map(GkSummary::count).collect()
    }

    /// `N_B`.
    pub fn count(&self) -> u64 {
        self.groups.iter().map(GkSummary::count).sum()
    }

    pub fn stored_tuples(&self) -> usize {
        self.groups.iter().map(GkSummary::len).sum()
    }

    pub fn peak_tuples(&self) -> usize {
        self.groups.iter().map(GkSummary::peak_len).sum()
    }

    /// Per-group rounded instances.
    pub fn group_instances(&self) -> Vec<RoundedInstance> {
        self.groups.iter().map(RoundedInstance::from_summary).collect()
    }

    pub fn finish(&self) -> RoundedInstance {
        self.group_instances()
            .iter()
            .fold(RoundedInstance::default(), |acc, g| acc.union(g))
    }
}

fn round_with(big_stream: &[f64], epsilon: f64, mode: RoundingMode) -> Result<RoundedInstance> {
    let mut rounder = GroupedRounder::new(epsilon, mode)?;
    for &size in big_stream {
        rounder.insert(size)?;
    }
    Ok(rounder.finish())
}

pub fn round_simple(big_stream: &[f64], epsilon: f64) -> Result<RoundedInstance> {
    round_with(big_stream, epsilon, RoundingMode::Simple)
}

pub fn round_geometric(big_stream: &[f64], epsilon: f64) -> Result<RoundedInstance> {
    round_with(big_stream, epsilon, RoundingMode::Geometric)
}
