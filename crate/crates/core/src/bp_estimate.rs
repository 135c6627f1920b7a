//! Streaming estimate of the optimal number of bins.
//!
//! Small items (size `≤ ε`) are only summed up. Big items go through a
//! [`GroupedRounder`]. After the stream, the rounded instance is packed into a
//! solution `S` and the free space `W = Σ_B max(0, 1 − ε − s(B))` is computed.
//! If the small volume `s` fits into `W` the estimate is `|S|`, otherwise the
//! overflow is spread over bins of capacity `1 − ε`:
//! `|S| + ⌈(s − W)/(1 − ε)⌉`.

use serde::{Deserialize, Serialize};

use crate::bp_round::{check_bp_epsilon, check_item_size, GroupedRounder, RoundedInstance, RoundingMode};
use crate::error::{Error, Result};
use crate::hmbp::{self, PackingSolution, Solver};
use crate::numeric::{ceil_tol, CompensatedSum};
use crate::streams::MemoryReport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorState {
    epsilon: f64,
    small_total: CompensatedSum,
    small_count: u64,
    rounder: GroupedRounder,
    items_seen: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateCase {
    /// `s ≤ W`.
    FitsInFreeSpace,
    /// `s > W`.
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEstimate {
    pub bins: u64,
    pub case: EstimateCase,
    /// `|S|`.
    pub solution_bins: u64,
    /// `W`.
    pub free_space: f64,
    /// `s`.
    pub small_total: f64,
    /// `s − W`, present in the overflow case.
    pub overflow: Option<f64>,
    pub sigma: usize,
    /// `⌈log₂(1/ε)⌉`.
    pub k: usize,
    pub solver_used: Solver,
    pub mode: RoundingMode,
    pub epsilon: f64,
    pub items_seen: u64,
    pub big_items: u64,
    pub rounded_size: f64,
}

impl BinEstimate {
    /// `(1 + 3ε)·opt + σ + k`: the upper end of the guarantee for a solver
    /// that packs the rounded instance within `OPT + σ` bins.
    pub fn upper_guarantee(&self, opt: u64) -> f64 {
        (1.0 + 3.0 * self.epsilon) * opt as f64 + self.sigma as f64 + self.k as f64
    }
}

impl EstimatorState {
    pub fn new(epsilon: f64, mode: RoundingMode) -> Result<Self> {
        check_bp_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            small_total: CompensatedSum::default(),
            small_count: 0,
            rounder: GroupedRounder::new(epsilon, mode)?,
            items_seen: 0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn process_item(&mut self, size: f64) -> Result<()> {
        check_item_size(size)?;
        if size <= self.epsilon {
            self.small_total.add(size);
            self.small_count += 1;
        } else {
            self.rounder.insert(size)?;
        }
        self.items_seen += 1;
        Ok(())
    }

    pub fn small_total(&self) -> f64 {
        self.small_total.value()
    }

    pub fn small_count(&self) -> u64 {
        self.small_count
    }

    pub fn items_seen(&self) -> u64 {
        self.items_seen
    }

    pub fn rounder(&self) -> &GroupedRounder {
        &self.rounder
    }

    pub fn rounded_instance(&self) -> RoundedInstance {
        self.rounder.finish()
    }

    /// Item-dependent state: the stored tuples plus the small-volume variable
    /// once it holds a value.
    pub fn memory(&self) -> MemoryReport {
        let small = u64::from(self.small_count > 0);
        MemoryReport::new(
            self.rounder.stored_tuples() as u64 + small,
            self.rounder.peak_tuples() as u64 + small,
            self.items_seen,
        )
    }

    pub fn finalize(&self, solver: Solver) -> Result<BinEstimate> {
        let instance = self.rounded_instance();
        let solution = hmbp::solve(&instance, solver)?;
        Ok(self.finalize_with(&instance, &solution, solver))
    }

    pub(crate) fn finalize_with(
        &self,
        instance: &RoundedInstance,
        solution: &PackingSolution,
        solver: Solver,
    ) -> BinEstimate {
        let s = self.small_total();
        let w = free_space_w(solution, self.epsilon);
        let solution_bins = solution.bins_used();
        let (bins, case, overflow) = if s <= w {
            (solution_bins, EstimateCase::FitsInFreeSpace, None)
        } else {
            let over = s - w;
            let extra = ceil_tol(over / (1.0 - self.epsilon));
            (solution_bins + extra, EstimateCase::Overflow, Some(over))
        };
        BinEstimate {
            bins,
            case,
            solution_bins,
            free_space: w,
            small_total: s,
            overflow,
            sigma: instance.sigma(),
            k: self.rounder.k(),
            solver_used: solver,
            mode: self.rounder.mode(),
            epsilon: self.epsilon,
            items_seen: self.items_seen,
            big_items: self.rounder.count(),
            rounded_size: instance.total_size(),
        }
    }
}

/// `W = Σ_B max(0, 1 − ε − s(B))`.
pub fn free_space_w(solution: &PackingSolution, epsilon: f64) -> f64 {
    let mut w = CompensatedSum::default();
    for u in solution.patterns() {
        w.add(u.uses as f64 * (1.0 - epsilon - u.fill).max(0.0));
    }
    w.value()
}

/// Runs the estimator over a whole stream.
pub fn estimate_bins(
    stream: &[f64],
    epsilon: f64,
    mode: RoundingMode,
    solver: Solver,
) -> Result<BinEstimate> {
    let mut state = EstimatorState::new(epsilon, mode)?;
    for &size in stream {
        state.process_item(size)?;
    }
    state.finalize(solver)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEstimate {
    /// `bins − 2N`.
    pub rank: i64,
    pub bins: u64,
    pub n: usize,
    pub estimate: BinEstimate,
}

fn check_rank_value(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.5 && x < 2.0 / 3.0 {
        Ok(())
    } else {
        Err(Error::RejectedInput(format!("{what} must lie in (1/2, 2/3), got {x}")))
    }
}

/// `1 − q`, rounded to 15 significant digits so that decimal queries give
/// decimal complements (`1 − 0.58` is `0.42`, not `0.42000000000000004`).
pub fn complement(q: f64) -> f64 {
    format!("{:.14e}", 1.0 - q).parse().expect("formatted float parses")
}

/// Bin packing stream whose optimum is `2N + rank(q)`: two items of each
/// value, then `2N` items of size `1 − q`.
pub fn rank_reduction_stream(values: &[f64], q: f64) -> Result<Vec<f64>> {
    check_rank_value(q, "query")?;
    for &v in values {
        check_rank_value(v, "value")?;
    }
    let mut stream: Vec<f64> = values.iter().flat_map(|&v| [v, v]).collect();
    stream.extend(std::iter::repeat_n(complement(q), 2 * values.len()));
    Ok(stream)
}

/// Estimates `rank(q)`, the number of values larger than `q`, through the bin
/// count estimator.
pub fn rank_reduction_demo(
    values: &[f64],
    q: f64,
    epsilon: f64,
    mode: RoundingMode,
    solver: Solver,
) -> Result<RankEstimate> {
    let stream = rank_reduction_stream(values, q)?;
    let estimate = estimate_bins(&stream, epsilon, mode, solver)?;
    Ok(RankEstimate {
        rank: estimate.bins as i64 - 2 * values.len() as i64,
        bins: estimate.bins,
        n: values.len(),
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hmbp::{Pattern, PatternUse};

    fn solution_with_fills(fills: &[f64]) -> PackingSolution {
        PackingSolution::from_uses(
            fills
                .iter()
                .enumerate()
                .map(|(i, &f)| {
                    let mut counts = vec![0; fills.len()];
                    counts[i] = 1;
                    PatternUse { pattern: Pattern { counts }, uses: 1, fill: f }
                })
                .collect(),
        )
    }

    #[test]
    fn process_item_routes_by_size() {
        let mut st = EstimatorState::new(0.1, RoundingMode::Geometric).unwrap();
        st.process_item(0.05).unwrap();
        assert_eq!(st.small_total(), 0.05);
        assert_eq!(st.rounder().count(), 0);
        st.process_item(0.5).unwrap();
        assert_eq!(st.small_total(), 0.05);
        assert_eq!(st.rounder().count(), 1);
        assert!(st.process_item(1.5).is_err());
        assert!(st.process_item(0.0).is_err());
    }

    #[test]
    fn alternating_stream_sums_exactly() {
        let mut st = EstimatorState::new(0.1, RoundingMode::Geometric).unwrap();
        for i in 0..1000 {
            st.process_item(if i % 2 == 0 { 0.05 } else { 0.5 }).unwrap();
        }
        assert!((st.small_total() - 25.0).abs() < 1e-12);
        assert_eq!(st.rounder().count(), 500);
        assert_eq!(st.items_seen(), 1000);
    }

    #[test]
    fn free_space_examples() {
        assert!((free_space_w(&solution_with_fills(&[0.5]), 0.1) - 0.4).abs() < 1e-12);
        assert_eq!(free_space_w(&solution_with_fills(&[0.95]), 0.1), 0.0);
        assert!((free_space_w(&solution_with_fills(&[0.5, 0.95, 0.7]), 0.1) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn big_only_stream_fits() {
        let est = estimate_bins(&[0.5; 14], 0.2, RoundingMode::Geometric, Solver::Gg).unwrap();
        assert_eq!(est.bins, 7);
        assert_eq!(est.case, EstimateCase::FitsInFreeSpace);
    }

    #[test]
    fn small_only_stream_overflows() {
        let est = estimate_bins(&[0.1; 100], 0.1, RoundingMode::Geometric, Solver::Gg).unwrap();
        assert_eq!(est.solution_bins, 0);
        assert_eq!(est.free_space, 0.0);
        assert_eq!(est.case, EstimateCase::Overflow);
        assert_eq!(est.bins, 12);
        assert_eq!(est.sigma, 0);
    }

    #[test]
    fn epsilon_out_of_range() {
        assert!(matches!(EstimatorState::new(0.5, RoundingMode::Simple), Err(Error::Config(_))));
    }

    #[test]
    fn complement_is_clean() {
        assert_eq!(complement(0.58), 0.42);
        assert_eq!(complement(0.6), 0.4);
    }

    #[test]
    fn rank_reduction_examples() {
        let stream = rank_reduction_stream(&[0.55, 0.60, 0.62], 0.58).unwrap();
        assert_eq!(stream, vec![0.55, 0.55, 0.60, 0.60, 0.62, 0.62, 0.42, 0.42, 0.42, 0.42, 0.42, 0.42]);

        let r = rank_reduction_demo(&[0.55, 0.60, 0.62], 0.58, 1.0 / 3.0, RoundingMode::Simple, Solver::Exact)
            .unwrap();
        assert_eq!(r.bins, 8);
        assert_eq!(r.rank, 2);

        let r = rank_reduction_demo(&[0.52, 0.53], 0.6, 0.2, RoundingMode::Geometric, Solver::Exact).unwrap();
        assert_eq!(r.bins, 4);
        assert_eq!(r.rank, 0);

        let r = rank_reduction_demo(&[0.61, 0.65, 0.62], 0.55, 0.25, RoundingMode::Simple, Solver::Exact).unwrap();
        assert_eq!(r.bins, 9);
        assert_eq!(r.rank, 3);

        assert!(rank_reduction_stream(&[0.7], 0.55).is_err());
        assert!(rank_reduction_stream(&[0.55], 0.5).is_err());
    }
}
