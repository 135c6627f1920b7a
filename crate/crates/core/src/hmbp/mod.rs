//! Solvers for high-multiplicity bin packing instances.
//!
//! A solution is a list of [`PatternUse`]s: a bin content (counts per size
//! class of the instance) together with the number of bins packed that way.
//! Solutions never expand the instance into individual bins, so FFD and the
//! Gilmore–Gomory heuristic run in time polynomial in `σ` and the number of
//! distinct patterns rather than in the number of items.

mod exact;
mod ffd;
mod lp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bp_round::RoundedInstance;
use crate::error::{Error, Result};
use crate::CAPACITY_TOL;

pub use exact::{solve_exact, solve_exact_packing, DEFAULT_EXACT_ITEM_LIMIT};
pub(crate) use exact::{pack_exact, ExactLimits};
pub use ffd::solve_ffd;
pub use lp::{lp_lower_bound, solve_gilmore_gomory, LpBound};

/// Counts per size class of an instance; one bin's content.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    pub counts: Vec<u64>,
}

impl Pattern {
    pub fn fill(&self, instance: &RoundedInstance) -> f64 {
        self.counts
            .iter()
            .zip(instance.entries())
            .map(|(&c, e)| c as f64 * e.size)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternUse {
    pub pattern: Pattern,
    pub uses: u64,
    /// Total size of one bin packed with `pattern`.
    pub fill: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PackingSolution {
    patterns: Vec<PatternUse>,
    bins_used: u64,
}

impl PackingSolution {
    /// Drops empty patterns and zero uses, and merges identical patterns.
    pub(crate) fn from_uses(uses: Vec<PatternUse>) -> Self {
        let mut merged: Vec<PatternUse> = Vec::with_capacity(uses.len());
        for u in uses {
            if u.uses == 0 || u.pattern.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|m| m.pattern == u.pattern) {
                Some(m) => m.uses += u.uses,
                None => merged.push(u),
            }
        }
        let bins_used = merged.iter().map(|u| u.uses).sum();
        Self { patterns: merged, bins_used }
    }

    pub fn patterns(&self) -> &[PatternUse] {
        &self.patterns
    }

    pub fn bins_used(&self) -> u64 {
        self.bins_used
    }

    /// `s(B)` for every bin.
    pub fn fill_levels(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.bins_used as usize);
        for u in &self.patterns {
            out.extend(std::iter::repeat_n(u.fill, u.uses as usize));
        }
        out
    }

    /// Items of each size class placed by the solution.
    pub fn coverage(&self, sigma: usize) -> Vec<u64> {
        let mut cover = vec![0u64; sigma];
        for u in &self.patterns {
            for (c, &k) in cover.iter_mut().zip(&u.pattern.counts) {
                *c += k * u.uses;
            }
        }
        cover
    }

    /// Every multiplicity is covered and every pattern fits a unit bin.
    pub fn is_valid_for(&self, instance: &RoundedInstance) -> bool {
        let sigma = instance.sigma();
        let covered = self
            .coverage(sigma)
            .iter()
            .zip(instance.entries())
            .all(|(&c, e)| c >= e.multiplicity);
        let feasible = self.patterns.iter().all(|u| {
            u.pattern.counts.len() == sigma && u.pattern.fill(instance) <= 1.0 + CAPACITY_TOL
        });
        covered && feasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Ffd,
    #[default]
    Gg,
    Exact,
}

impl Solver {
    pub fn label(self) -> &'static str {
        match self {
            Solver::Ffd => "ffd",
            Solver::Gg => "gg",
            Solver::Exact => "exact",
        }
    }

    /// Whether the solver packs within `OPT + σ` bins.
    pub fn within_opt_plus_sigma(self) -> bool {
        !matches!(self, Solver::Ffd)
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ffd" => Ok(Solver::Ffd),
            "gg" => Ok(Solver::Gg),
            "exact" => Ok(Solver::Exact),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

pub fn solve(instance: &RoundedInstance, solver: Solver) -> Result<PackingSolution> {
    match solver {
        Solver::Ffd => solve_ffd(instance),
        Solver::Gg => solve_gilmore_gomory(instance),
        Solver::Exact => solve_exact_packing(instance, DEFAULT_EXACT_ITEM_LIMIT),
    }
}

pub(crate) fn check_feasible(instance: &RoundedInstance) -> Result<()> {
    match instance.entries().iter().find(|e| e.size > 1.0 + CAPACITY_TOL) {
        Some(e) => Err(Error::InfeasibleItem { size: e.size }),
        None => Ok(()),
    }
}

/// Most copies of an item of size `size` that fit into the remaining `room`.
pub(crate) fn copies_fitting(size: f64, room: f64) -> u64 {
    let t = ((room + CAPACITY_TOL) / size).floor();
    if t <= 0.0 {
        0
    } else {
        t as u64
    }
}
