//! Rounding summaries for makespan scheduling.
//!
//! [`ScalarSchedSummary`] keeps, relative to the largest job `p_max`, one
//! counter per power-of-`(1+ε)` size interval for the `k + 1` intervals just
//! below `p_max`, plus the total volume `s` of all smaller jobs. Intervals are
//! `((1+ε)^i, (1+ε)^(i+1)]` with absolute integer exponents.
//!
//! [`VectorTypeSummary`] does the same for vector jobs in small dimension:
//! after zeroing coordinates below `δ·‖v‖∞` (`δ = ε/d`), a big job is counted
//! by its vector of coordinate exponents and a small job adds its norm to the
//! mass of its vector of exponents relative to its own norm.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::makespan::{exact_makespan, lpt_makespan};
use crate::numeric::{power_bucket, CompensatedSum};
use crate::streams::MemoryReport;
use crate::vector::VectorItem;

fn check_sched_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// `k = ⌈log_{1+ε}(1/ε)⌉`.
pub fn bucket_span(epsilon: f64) -> i64 {
    let base = 1.0 + epsilon;
    let mut k = ((1.0 / epsilon).ln() / base.ln()).ceil() as i64;
    while k > 0 && base.powi(k as i32 - 1) >= 1.0 / epsilon {
        k -= 1;
    }
    while base.powi(k as i32) < 1.0 / epsilon {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarSchedSummary {
    epsilon: f64,
    k: i64,
    p_max: f64,
    /// `p_max ∈ ((1+ε)^q, (1+ε)^(q+1)]`.
    q: Option<i64>,
    /// `L_{q−k}, …, L_q`.
    counters: VecDeque<u64>,
    small: CompensatedSum,
    small_on_arrival: u64,
    folded: u64,
    jobs: u64,
    peak_stored: u64,
}

/// Makespan estimate from a scalar summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedEstimate {
    pub makespan: f64,
    /// Makespan of the rounded big jobs alone.
    pub big_makespan: f64,
    /// `V/m + ε·p_max`, or `V/m` without small volume.
    pub volume_bound: f64,
    /// `exact` or `lpt`.
    pub big_solver: &'static str,
    pub rounded_big_jobs: u64,
}

impl ScalarSchedSummary {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_sched_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            k: bucket_span(epsilon),
            p_max: 0.0,
            q: None,
            counters: VecDeque::new(),
            small: CompensatedSum::default(),
            small_on_arrival: 0,
            folded: 0,
            jobs: 0,
            peak_stored: 0,
        })
    }

    fn base(&self) -> f64 {
        1.0 + self.epsilon
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn q(&self) -> Option<i64> {
        self.q
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn small_total(&self) -> f64 {
        self.small.value()
    }

    pub fn jobs(&self) -> u64 {
        self.jobs
    }

    /// `(i, L_i)` for `i = q−k, …, q`.
    pub fn counters(&self) -> Vec<(i64, u64)> {
        let Some(q) = self.q else { return Vec::new() };
        self.counters.iter().enumerate().map(|(j, &c)| (q - self.k + j as i64, c)).collect()
    }

    /// Jobs accounted for in `s`: those small on arrival plus those folded in.
    pub fn jobs_in_small_volume(&self) -> u64 {
        self.small_on_arrival + self.folded
    }

    fn stored(&self) -> u64 {
        self.counters.iter().filter(|&&c| c > 0).count() as u64 + u64::from(self.jobs_in_small_volume() > 0)
    }

    /// Nonzero counters plus the small-volume variable once it is used.
    pub fn memory(&self) -> MemoryReport {
        MemoryReport::new(self.stored(), self.peak_stored, self.jobs)
    }

    pub fn process(&mut self, p: f64) -> Result<()> {
        check_finite(p, "job size")?;
        if p <= 0.0 {
            return Err(Error::RejectedInput(format!("job size must be positive, got {p}")));
        }
        let base = self.base();
        if p > self.p_max {
            self.p_max = p;
            let new_q = power_bucket(p, base);
            match self.q {
                None => {
                    self.counters = std::iter::repeat_n(0, self.k as usize + 1).collect();
                }
                Some(q) if new_q > q => {
                    let shift = (new_q - q).min(self.k + 1);
                    for step in 0..shift {
                        let i = q - self.k + step;
                        let c = self.counters.pop_front().expect("window holds k+1 counters");
                        if c > 0 {
                            self.small.add(c as f64 * base.powi(i as i32 + 1));
                            self.folded += c;
                        }
                        self.counters.push_back(0);
                    }
                }
                Some(_) => {}
            }
            self.q = Some(new_q);
        }
        let q = self.q.expect("set above");
        let i = power_bucket(p, base);
        if i >= q - self.k {
            self.counters[(i - (q - self.k)) as usize] += 1;
        } else {
            self.small.add(p);
            self.small_on_arrival += 1;
        }
        self.jobs += 1;
        self.peak_stored = self.peak_stored.max(self.stored());
        Ok(())
    }

    /// Rounded big jobs: `L_i` copies of `(1+ε)^(i+1)`.
    pub fn rounded_big_jobs(&self) -> Vec<f64> {
        let base = self.base();
        self.counters()
            .into_iter()
            .flat_map(|(i, c)| std::iter::repeat_n(base.powi(i as i32 + 1), c as usize))
            .collect()
    }

    /// `max(M_B, V/m + ε·p_max)`, where `M_B` is the optimal makespan of the
    /// rounded big jobs (LPT above `exact_limit` jobs) and `V` the rounded
    /// total volume. The `ε·p_max` term, which covers the last small job placed
    /// on a least loaded machine, is dropped when there is no small volume.
    pub fn estimate(&self, m: usize, exact_limit: usize) -> Result<SchedEstimate> {
        if self.jobs == 0 {
            return Err(Error::EmptySummary);
        }
        if m == 0 {
            return Err(Error::Config("machine count must be at least 1".into()));
        }
        let big = self.rounded_big_jobs();
        let (big_makespan, big_solver) = if big.len() <= exact_limit {
            let jobs: Vec<[f64; 1]> = big.iter().map(|&p| [p]).collect();
            (exact_makespan(&jobs, m, exact_limit)?.makespan, "exact")
        } else {
            (lpt_makespan(&big, m)?, "lpt")
        };
        let mut volume = CompensatedSum::default();
        for &p in &big {
            volume.add(p);
        }
        let s = self.small_total();
        volume.add(s);
        let slack = if s > 0.0 { self.epsilon * self.p_max } else { 0.0 };
        let volume_bound = volume.value() / m as f64 + slack;
        Ok(SchedEstimate {
            makespan: big_makespan.max(volume_bound),
            big_makespan,
            volume_bound,
            big_solver,
            rounded_big_jobs: big.len() as u64,
        })
    }
}

/// Zeroes every coordinate `≤ δ·‖v‖∞`.
pub fn zero_small_coords(v: &VectorItem, delta: f64) -> VectorItem {
    let cut = delta * v.norm_inf();
    VectorItem::from_raw(v.coords().iter().map(|&c| if c > cut { c } else { 0.0 }).collect())
}

/// Coordinate exponents of a big job; `None` stands for a zero coordinate.
pub type BigType = Vec<Option<i64>>;
/// Coordinate exponents of a small job relative to its norm; `None` stands
/// for a zero coordinate.
pub type SmallType = Vec<Option<i64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorTypeSummary {
    epsilon: f64,
    d: usize,
    delta: f64,
    p_max: f64,
    big: BTreeMap<BigType, u64>,
    small: BTreeMap<SmallType, CompensatedSum>,
    jobs: u64,
    peak_stored: u64,
    peak_big_types: usize,
}

/// Makespan estimate of a vector type summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorTypeEstimate {
    pub makespan: f64,
    pub reconstructed_jobs: usize,
    pub big_types: usize,
    pub small_types: usize,
}

impl VectorTypeSummary {
    pub fn new(d: usize, epsilon: f64) -> Result<Self> {
        check_sched_epsilon(epsilon)?;
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(Self {
            epsilon,
            d,
            delta: epsilon / d as f64,
            p_max: 0.0,
            big: BTreeMap::new(),
            small: BTreeMap::new(),
            jobs: 0,
            peak_stored: 0,
            peak_big_types: 0,
        })
    }

    fn base(&self) -> f64 {
        1.0 + self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn big_types(&self) -> &BTreeMap<BigType, u64> {
        &self.big
    }

    /// Mass `s_t` of every small type.
    pub fn small_masses(&self) -> BTreeMap<SmallType, f64> {
        self.small.iter().map(|(t, s)| (t.clone(), s.value())).collect()
    }

    pub fn peak_big_types(&self) -> usize {
        self.peak_big_types
    }

    /// `⌈log_{1+ε}(1/δ²)⌉^d`.
    pub fn big_type_bound(&self) -> f64 {
        let per_coord = ((1.0 / (self.delta * self.delta)).ln() / self.base().ln()).ceil();
        per_coord.powi(self.d as i32)
    }

    fn stored(&self) -> u64 {
        (self.big.len() + self.small.len()) as u64
    }

    pub fn memory(&self) -> MemoryReport {
        MemoryReport::new(self.stored(), self.peak_stored, self.jobs)
    }

    pub fn process(&mut self, v: &VectorItem) -> Result<()> {
        if v.dim() != self.d {
            return Err(Error::RejectedInput(format!(
                "job has {} coordinates, expected {}",
                v.dim(),
                self.d
            )));
        }
        self.jobs += 1;
        let v = zero_small_coords(v, self.delta);
        let norm = v.norm_inf();
        if norm == 0.0 {
            return Ok(());
        }
        if norm > self.p_max {
            self.p_max = norm;
            self.demote();
        }
        let base = self.base();
        if norm > self.delta * self.p_max {
            let t: BigType = v
                .coords()
                .iter()
                .map(|&c| (c > 0.0).then(|| power_bucket(c, base)))
                .collect();
            *self.big.entry(t).or_insert(0) += 1;
        } else {
            let t: SmallType = v
                .coords()
                .iter()
                .map(|&c| (c > 0.0).then(|| relative_exponent(norm / c, base)))
                .collect();
            self.small.entry(t).or_default().add(norm);
        }
        self.peak_big_types = self.peak_big_types.max(self.big.len());
        self.peak_stored = self.peak_stored.max(self.stored());
        Ok(())
    }

    /// Converts every big type whose jobs are certainly small now, that is
    /// `(1+ε)^(e_max+1) ≤ δ·p_max` with `e_max` its largest exponent.
    fn demote(&mut self) {
        let base = self.base();
        let cut = self.delta * self.p_max;
        let expired: Vec<BigType> = self
            .big
            .keys()
            .filter(|t| base.powi(e_max(t) as i32 + 1) <= cut)
            .cloned()
            .collect();
        for t in expired {
            let count = self.big.remove(&t).expect("key listed above");
            let e = e_max(&t);
            let small: SmallType = t.iter().map(|ti| ti.map(|x| e - x)).collect();
            self.small
                .entry(small)
                .or_default()
                .add(count as f64 * base.powi(e as i32 + 1));
        }
    }

    /// Big types expand to `L_t` jobs with coordinates `(1+ε)^(t_i+1)`. Each
    /// small type becomes `⌈s_t/h⌉` jobs of norm `h = δ·p_max` with
    /// coordinates `h·(1+ε)^(−t_i)`, the last one scaled to the remaining mass.
    pub fn reconstruct(&self) -> Vec<VectorItem> {
        let base = self.base();
        let mut out = Vec::new();
        for (t, &count) in &self.big {
            let coords: Vec<f64> = t.iter().map(|ti| ti.map_or(0.0, |x| base.powi(x as i32 + 1))).collect();
            for _ in 0..count {
                out.push(VectorItem::from_raw(coords.clone()));
            }
        }
        let h = self.delta * self.p_max;
        for (t, mass) in &self.small {
            let mass = mass.value();
            if mass <= 0.0 || h <= 0.0 {
                continue;
            }
            let coords: Vec<f64> = t.iter().map(|ti| ti.map_or(0.0, |x| h * base.powi(-(x as i32)))).collect();
            let full = (mass / h - 1e-9).ceil().max(1.0) as usize;
            let last = mass - (full - 1) as f64 * h;
            for j in 0..full {
                let factor = if j + 1 == full { last / h } else { 1.0 };
                out.push(VectorItem::from_raw(coords.iter().map(|c| c * factor).collect()));
            }
        }
        out
    }

    /// Exact optimal makespan of the reconstructed instance.
    pub fn estimate(&self, m: usize, job_limit: usize) -> Result<VectorTypeEstimate> {
        if self.jobs == 0 {
            return Err(Error::EmptySummary);
        }
        let jobs = self.reconstruct();
        let makespan = if jobs.is_empty() { 0.0 } else { exact_makespan(&jobs, m, job_limit)?.makespan };
        Ok(VectorTypeEstimate {
            makespan,
            reconstructed_jobs: jobs.len(),
            big_types: self.big.len(),
            small_types: self.small.len(),
        })
    }
}

fn e_max(t: &BigType) -> i64 {
    t.iter().flatten().copied().max().expect("a big type has a nonzero coordinate")
}

/// Largest `t ≥ 0` with `(1+ε)^t ≤ ratio`.
fn relative_exponent(ratio: f64, base: f64) -> i64 {
    let mut t = (ratio.ln() / base.ln()).floor().max(0.0) as i64;
    while t > 0 && base.powi(t as i32) > ratio {
        t -= 1;
    }
    while base.powi(t as i32 + 1) <= ratio {
        t += 1;
    }
    t
}
