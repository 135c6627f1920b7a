//! Vector bin packing estimates built on the scalar estimator.
//!
//! The ℓ∞ variant replaces every vector by one scalar item of size `‖v‖∞` and
//! runs the scalar estimator with precision `ε/d`. Any bin of the scalar
//! packing holds vectors whose coordinate sums are at most the sum of their
//! norms, so the estimate is feasible for the vectors and within `d + ε` of the
//! optimum up to the additive terms.
//!
//! The group-split variant sends each vector to the group of its largest
//! coordinate (lowest index on ties) and packs every group as a scalar stream
//! of that coordinate, adding up `d` estimates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bp_estimate::{BinEstimate, EstimatorState};
use crate::bp_round::RoundingMode;
use crate::error::{Error, Result};
use crate::hmbp::{pack_exact, ExactLimits, Solver};
use crate::streams::MemoryReport;
use crate::vector::VectorItem;

pub const DEFAULT_VBP_EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VbpVariant {
    #[default]
    Linf,
    GroupSplit,
}

impl VbpVariant {
    pub fn label(self) -> &'static str {
        match self {
            VbpVariant::Linf => "linf",
            VbpVariant::GroupSplit => "groupsplit",
        }
    }
}

impl fmt::Display for VbpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for VbpVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linf" => Ok(VbpVariant::Linf),
            "groupsplit" => Ok(VbpVariant::GroupSplit),
            other => Err(Error::Config(format!("unknown vector bin packing variant `{other}`"))),
        }
    }
}

/// Precision of the scalar run for each variant.
pub fn scalar_epsilon(variant: VbpVariant, d: usize, epsilon: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    match variant {
        VbpVariant::Linf => {
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
            }
            let delta = epsilon / d as f64;
            if delta > 1.0 / 3.0 {
                return Err(Error::Config(format!("epsilon/d must be at most 1/3, got {delta}")));
            }
            Ok(delta)
        }
        VbpVariant::GroupSplit => {
            if !(epsilon > 0.0 && epsilon <= 1.0 / 3.0) {
                return Err(Error::Config(format!("epsilon must lie in (0, 1/3], got {epsilon}")));
            }
            Ok(epsilon)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VbpEstimator {
    variant: VbpVariant,
    d: usize,
    epsilon: f64,
    /// One estimator for `linf`, `d` for `groupsplit`.
    scalar: Vec<EstimatorState>,
    zero_vectors: u64,
    items_seen: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VbpEstimate {
    pub bins: u64,
    pub variant: VbpVariant,
    pub d: usize,
    pub epsilon: f64,
    pub scalar_epsilon: f64,
    /// Scalar estimates that add up to `bins`.
    pub parts: Vec<BinEstimate>,
    pub zero_vectors: u64,
    pub items_seen: u64,
}

impl VbpEstimate {
    /// Sum over the scalar runs of `σ + k`.
    pub fn additive(&self) -> u64 {
        self.parts.iter().map(|p| (p.sigma + p.k) as u64).sum()
    }
}

impl VbpEstimator {
    pub fn new(variant: VbpVariant, d: usize, epsilon: f64, mode: RoundingMode) -> Result<Self> {
        let delta = scalar_epsilon(variant, d, epsilon)?;
        let copies = match variant {
            VbpVariant::Linf => 1,
            VbpVariant::GroupSplit => d,
        };
        let scalar = (0..copies).map(|_| EstimatorState::new(delta, mode)).collect::<Result<_>>()?;
        Ok(Self { variant, d, epsilon, scalar, zero_vectors: 0, items_seen: 0 })
    }

    pub fn process(&mut self, v: &VectorItem) -> Result<()> {
        v.check_dim(self.d)?;
        self.items_seen += 1;
        let norm = v.norm_inf();
        if norm == 0.0 {
            self.zero_vectors += 1;
            return Ok(());
        }
        let group = match self.variant {
            VbpVariant::Linf => 0,
            VbpVariant::GroupSplit => v.argmax(),
        };
        self.scalar[group].process_item(norm)
    }

    pub fn memory(&self) -> MemoryReport {
        let mut stored = 0;
        let mut peak = 0;
        for s in &self.scalar {
            let m = s.memory();
            stored += m.stored_entries;
            peak += m.peak_entries;
        }
        MemoryReport::new(stored, peak, self.items_seen)
    }

    pub fn finalize(&self, solver: Solver) -> Result<VbpEstimate> {
        let parts = self.scalar.iter().map(|s| s.finalize(solver)).collect::<Result<Vec<_>>>()?;
        Ok(VbpEstimate {
            bins: parts.iter().map(|p| p.bins).sum(),
            variant: self.variant,
            d: self.d,
            epsilon: self.epsilon,
            scalar_epsilon: self.scalar[0].epsilon(),
            parts,
            zero_vectors: self.zero_vectors,
            items_seen: self.items_seen,
        })
    }
}

/// ℓ∞ reduction estimate of a whole stream.
pub fn vbp_estimate(
    items: &[VectorItem],
    d: usize,
    epsilon: f64,
    mode: RoundingMode,
    solver: Solver,
) -> Result<VbpEstimate> {
    run(VbpVariant::Linf, items, d, epsilon, mode, solver)
}

/// Largest-coordinate split estimate of a whole stream.
pub fn vbp_group_split_estimate(
    items: &[VectorItem],
    d: usize,
    epsilon: f64,
    mode: RoundingMode,
    solver: Solver,
) -> Result<VbpEstimate> {
    run(VbpVariant::GroupSplit, items, d, epsilon, mode, solver)
}

fn run(
    variant: VbpVariant,
    items: &[VectorItem],
    d: usize,
    epsilon: f64,
    mode: RoundingMode,
    solver: Solver,
) -> Result<VbpEstimate> {
    let mut est = VbpEstimator::new(variant, d, epsilon, mode)?;
    for v in items {
        est.process(v)?;
    }
    est.finalize(solver)
}

/// Optimal number of bins for vectors, every dimension capped at one.
pub fn vbp_exact(items: &[VectorItem], item_limit: usize) -> Result<u64> {
    Ok(vbp_exact_packing(items, item_limit)?.len() as u64)
}

/// Optimal packing as lists of item indices; zero vectors are left out.
pub fn vbp_exact_packing(items: &[VectorItem], item_limit: usize) -> Result<Vec<Vec<usize>>> {
    if items.len() > item_limit {
        return Err(Error::OracleScale { items: items.len(), limit: item_limit });
    }
    let kept: Vec<usize> = (0..items.len()).filter(|&i| items[i].norm_inf() > 0.0).collect();
    let vectors: Vec<Vec<f64>> = kept.iter().map(|&i| items[i].coords().to_vec()).collect();
    let bins = pack_exact(&vectors, ExactLimits::items(item_limit))?;
    Ok(bins.into_iter().map(|b| b.into_iter().map(|j| kept[j]).collect()).collect())
}
