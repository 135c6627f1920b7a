//! Cutting-stock LP by column generation, and the Gilmore–Gomory rounding.
//!
//! The master problem is `min Σ x_p` subject to `Σ_p a_ip x_p ≥ b_i`, `x ≥ 0`,
//! written with surplus variables as `A x − s = b`. It is solved by a dense
//! revised simplex with an explicit basis inverse. New columns come from a
//! bounded knapsack over the duals; pattern counts are capped by the
//! multiplicities, which keeps the LP a relaxation of the integer problem.

use serde::{Deserialize, Serialize};

use crate::bp_round::RoundedInstance;
use crate::error::{Error, Result};
use crate::CAPACITY_TOL;

use super::{check_feasible, copies_fitting, solve_ffd, PackingSolution, Pattern, PatternUse};

const PRICING_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 50;
const DEGENERATE_STREAK: usize = 20;
const MAX_PIVOTS: usize = 200_000;
const MAX_COLUMNS: usize = 20_000;
const PRICING_NODE_LIMIT: u64 = 2_000_000;

/// Result of column generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpBound {
    /// Optimal value of the final restricted master problem.
    pub value: f64,
    /// A proven lower bound on the LP; equals `value` when `proven` holds.
    pub lower_bound: f64,
    /// Pricing proved that no column improves the master problem.
    pub proven: bool,
    pub columns: usize,
    pub pivots: usize,
}

impl LpBound {
    /// `⌈lower_bound⌉`, ignoring floating noise.
    pub fn ceil(&self) -> u64 {
        let c = (self.lower_bound - 1e-6).ceil();
        if c <= 0.0 {
            0
        } else {
            c as u64
        }
    }
}

pub fn lp_lower_bound(instance: &RoundedInstance) -> Result<LpBound> {
    check_feasible(instance)?;
    if instance.is_empty() {
        return Ok(LpBound { value: 0.0, lower_bound: 0.0, proven: true, columns: 0, pivots: 0 });
    }
    Ok(column_generation(instance)?.bound)
}

/// Rounds an optimal basic solution of the cutting-stock LP.
///
/// Two roundings are built and the smaller kept: every positive basic
/// variable rounded up, and every basic variable rounded down with the
/// leftover items packed by first fit decreasing. Over-covered items are
/// removed from their bins and empty bins dropped. The first rounding alone
/// uses at most `⌈LP⌉ + σ` bins.
pub fn solve_gilmore_gomory(instance: &RoundedInstance) -> Result<PackingSolution> {
    check_feasible(instance)?;
    if instance.is_empty() {
        return Ok(PackingSolution::default());
    }
    let cg = column_generation(instance)?;
    let round_up = round_solution(instance, &cg, |x| (x - 1e-9).ceil().max(0.0) as u64)?;
    let round_down = round_solution(instance, &cg, |x| (x + 1e-9).floor().max(0.0) as u64)?;
    Ok(if round_down.bins_used() < round_up.bins_used() { round_down } else { round_up })
}

struct ColumnGeneration {
    bound: LpBound,
    /// Patterns with a positive value in the final basis.
    support: Vec<(Vec<u64>, f64)>,
}

fn round_solution(
    instance: &RoundedInstance,
    cg: &ColumnGeneration,
    round: impl Fn(f64) -> u64,
) -> Result<PackingSolution> {
    let mut uses: Vec<PatternUse> = cg
        .support
        .iter()
        .map(|(counts, x)| {
            let pattern = Pattern { counts: counts.clone() };
            let fill = pattern.fill(instance);
            PatternUse { pattern, uses: round(*x), fill }
        })
        .filter(|u| u.uses > 0)
        .collect();
    trim_overcoverage(instance, &mut uses);
    let partial = PackingSolution::from_uses(uses);

    let cover = partial.coverage(instance.sigma());
    let residual: Vec<(usize, u64)> = instance
        .entries()
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let missing = e.multiplicity.saturating_sub(cover[i]);
            (missing > 0).then_some((i, missing))
        })
        .collect();
    if residual.is_empty() {
        return Ok(partial);
    }
    let sub = RoundedInstance::from_pairs(
        residual.iter().map(|&(i, m)| (instance.entries()[i].size, m)),
    )?;
    let packed = solve_ffd(&sub)?;
    let mut all = partial.patterns().to_vec();
    for u in packed.patterns() {
        let mut counts = vec![0; instance.sigma()];
        for (&(i, _), &c) in residual.iter().zip(&u.pattern.counts) {
            counts[i] = c;
        }
        all.push(PatternUse { pattern: Pattern { counts }, uses: u.uses, fill: u.fill });
    }
    Ok(PackingSolution::from_uses(all))
}

/// Removes items beyond the multiplicities, last patterns first, splitting a
/// pattern group when only some of its bins lose items.
fn trim_overcoverage(instance: &RoundedInstance, uses: &mut Vec<PatternUse>) {
    for (i, entry) in instance.entries().iter().enumerate() {
        let covered: u64 = uses.iter().map(|u| u.pattern.counts[i] * u.uses).sum();
        let mut excess = covered.saturating_sub(entry.multiplicity);
        let mut j = uses.len();
        while excess > 0 && j > 0 {
            j -= 1;
            let c = uses[j].pattern.counts[i];
            if c == 0 {
                continue;
            }
            let group = uses[j].uses;
            if excess >= c * group {
                uses[j].pattern.counts[i] = 0;
                excess -= c * group;
                continue;
            }
            let stripped = excess / c;
            let rest = excess % c;
            let mut split = Vec::new();
            if stripped > 0 {
                let mut p = uses[j].pattern.clone();
                p.counts[i] = 0;
                split.push((p, stripped));
            }
            if rest > 0 {
                let mut p = uses[j].pattern.clone();
                p.counts[i] -= rest;
                split.push((p, 1));
            }
            let consumed: u64 = split.iter().map(|(_, n)| n).sum();
            uses[j].uses -= consumed;
            for (pattern, n) in split {
                uses.push(PatternUse { pattern, uses: n, fill: 0.0 });
            }
            excess = 0;
        }
    }
    for u in uses.iter_mut() {
        u.fill = u.pattern.fill(instance);
    }
}

fn column_generation(instance: &RoundedInstance) -> Result<ColumnGeneration> {
    let sizes: Vec<f64> = instance.entries().iter().map(|e| e.size).collect();
    let demand: Vec<u64> = instance.entries().iter().map(|e| e.multiplicity).collect();
    let sigma = sizes.len();

    let singletons: Vec<Vec<u64>> = (0..sigma)
        .map(|i| {
            let mut counts = vec![0; sigma];
            counts[i] = copies_fitting(sizes[i], 1.0).min(demand[i]).max(1);
            counts
        })
        .collect();
    let mut master = Master::new(demand.iter().map(|&b| b as f64).collect(), singletons);

    let (proven, pricing_upper) = loop {
        master.optimize()?;
        let duals = master.duals();
        let priced = price(&sizes, &demand, &duals);
        if priced.value <= 1.0 + PRICING_TOL {
            break (priced.proven, priced.upper_bound);
        }
        if master.has_column(&priced.counts) {
            break (false, priced.upper_bound);
        }
        if master.columns.len() >= MAX_COLUMNS {
            let best = solve_ffd(instance).map(|s| s.bins_used()).unwrap_or(0);
            return Err(Error::SolverLimit { iterations: master.columns.len(), best_bins: best });
        }
        master.add_column(priced.counts);
    };

    let value = master.objective();
    // Farley: LP ≥ z_RMP / max(1, best pricing value).
    let farley = value / pricing_upper.max(1.0);
    let volume = instance.total_size() / (1.0 + CAPACITY_TOL);
    let lower_bound = if proven { value } else { farley.max(volume).min(value) };
    let support = master.support();
    Ok(ColumnGeneration {
        bound: LpBound {
            value,
            lower_bound,
            proven,
            columns: master.columns.len(),
            pivots: master.pivots,
        },
        support,
    })
}

/// Restricted master problem. Variables `0..σ` are the surpluses, variable
/// `σ + p` is column `p`.
struct Master {
    sigma: usize,
    rhs: Vec<f64>,
    columns: Vec<Vec<u64>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<f64>>,
    xb: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
}

impl Master {
    fn new(rhs: Vec<f64>, singletons: Vec<Vec<u64>>) -> Self {
        let sigma = rhs.len();
        let mut binv = vec![vec![0.0; sigma]; sigma];
        let mut xb = vec![0.0; sigma];
        for i in 0..sigma {
            let c = singletons[i][i] as f64;
            binv[i][i] = 1.0 / c;
            xb[i] = rhs[i] / c;
        }
        let mut is_basic = vec![false; sigma];
        is_basic.extend(std::iter::repeat_n(true, sigma));
        Self {
            sigma,
            rhs,
            columns: singletons,
            basis: (sigma..2 * sigma).collect(),
            is_basic,
            binv,
            xb,
            since_refactor: 0,
            pivots: 0,
        }
    }

    fn has_column(&self, counts: &[u64]) -> bool {
        self.columns.iter().any(|c| c.as_slice() == counts)
    }

    fn add_column(&mut self, counts: Vec<u64>) {
        self.columns.push(counts);
        self.is_basic.push(false);
    }

    fn cost(&self, var: usize) -> f64 {
        if var < self.sigma {
            0.0
        } else {
            1.0
        }
    }

    fn column(&self, var: usize) -> Vec<f64> {
        if var < self.sigma {
            let mut col = vec![0.0; self.sigma];
            col[var] = -1.0;
            col
        } else {
            self.columns[var - self.sigma].iter().map(|&c| c as f64).collect()
        }
    }

    fn duals(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.sigma];
        for (r, &var) in self.basis.iter().enumerate() {
            let c = self.cost(var);
            if c != 0.0 {
                for (yj, bij) in y.iter_mut().zip(&self.binv[r]) {
                    *yj += c * bij;
                }
            }
        }
        y
    }

    fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).map(|(&v, &x)| self.cost(v) * x).sum()
    }

    fn support(&self) -> Vec<(Vec<u64>, f64)> {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|&(&v, &x)| v >= self.sigma && x > 1e-9)
            .map(|(&v, &x)| (self.columns[v - self.sigma].clone(), x))
            .collect()
    }

    fn reduced_cost(&self, var: usize, y: &[f64]) -> f64 {
        if var < self.sigma {
            y[var]
        } else {
            let col = &self.columns[var - self.sigma];
            1.0 - col.iter().zip(y).map(|(&a, &yi)| a as f64 * yi).sum::<f64>()
        }
    }

    /// Primal simplex to optimality over the current columns: Dantzig pricing,
    /// switching to Bland's rule after a run of degenerate pivots.
    fn optimize(&mut self) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::SolverLimit { iterations: self.pivots, best_bins: 0 });
            }
            let bland = degenerate >= DEGENERATE_STREAK;
            let y = self.duals();
            let mut entering: Option<(usize, f64)> = None;
            for var in 0..self.sigma + self.columns.len() {
                if self.is_basic[var] {
                    continue;
                }
                let rc = self.reduced_cost(var, &y);
                if rc >= -REDUCED_COST_TOL {
                    continue;
                }
                match entering {
                    None => entering = Some((var, rc)),
                    Some((_, best)) if !bland && rc < best => entering = Some((var, rc)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };

            let col = self.column(q);
            let d: Vec<f64> = self
                .binv
                .iter()
                .map(|row| row.iter().zip(&col).map(|(b, a)| b * a).sum())
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.sigma {
                if d[r] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.xb[r].max(0.0) / d[r];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, best)) => {
                        if ratio < best - 1e-12
                            || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, best))
                        }
                    }
                };
            }
            // Costs are non-negative, so the master problem is bounded.
            let Some((r, step)) = leave else {
                return Err(Error::SolverLimit { iterations: self.pivots, best_bins: 0 });
            };
            degenerate = if step <= 1e-12 { degenerate + 1 } else { 0 };
            self.pivot(r, q, &d);
        }
    }

    fn pivot(&mut self, r: usize, q: usize, d: &[f64]) {
        let pr = d[r];
        for v in self.binv[r].iter_mut() {
            *v /= pr;
        }
        self.xb[r] /= pr;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r];
        for i in 0..self.sigma {
            if i == r || d[i] == 0.0 {
                continue;
            }
            let f = d[i];
            for (v, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.xb[i] -= f * pivot_x;
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Recomputes the basis inverse from scratch (Gauss–Jordan, partial pivoting).
    fn refactor(&mut self) {
        self.since_refactor = 0;
        let n = self.sigma;
        let mut a: Vec<Vec<f64>> = vec![vec![0.0; 2 * n]; n];
        for (c, &var) in self.basis.iter().enumerate() {
            for (r, v) in self.column(var).into_iter().enumerate() {
                a[r][c] = v;
            }
        }
        for (r, row) in a.iter_mut().enumerate() {
            row[n + r] = 1.0;
        }
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
                .expect("non-empty range");
            if a[p][c].abs() < 1e-12 {
                return;
            }
            a.swap(c, p);
            let inv = 1.0 / a[c][c];
            for v in a[c].iter_mut() {
                *v *= inv;
            }
            let pivot_row = a[c].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == c || row[c] == 0.0 {
                    continue;
                }
                let f = row[c];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.binv = a.into_iter().map(|row| row[n..].to_vec()).collect();
        self.xb = self
            .binv
            .iter()
            .map(|row| row.iter().zip(&self.rhs).map(|(b, r)| b * r).sum::<f64>())
            .map(|x: f64| if x.abs() < 1e-12 { 0.0 } else { x })
            .collect();
    }
}

struct Priced {
    counts: Vec<u64>,
    value: f64,
    /// Upper bound on the best pattern value.
    upper_bound: f64,
    proven: bool,
}

/// Bounded knapsack `max Σ a_i y_i` over patterns with `a_i ≤ b_i`, by depth
/// first search in order of decreasing `y_i / s_i`.
fn price(sizes: &[f64], caps: &[u64], duals: &[f64]) -> Priced {
    let mut order: Vec<usize> = (0..sizes.len()).filter(|&i| duals[i] > 1e-12).collect();
    order.sort_by(|&a, &b| (duals[b] / sizes[b]).total_cmp(&(duals[a] / sizes[a])));

    let root_bound = fractional_bound(&order, sizes, caps, duals, 1.0);
    let mut dfs = PricingSearch {
        order: &order,
        sizes,
        caps,
        duals,
        current: vec![0; sizes.len()],
        best: vec![0; sizes.len()],
        best_value: 0.0,
        nodes: 0,
        aborted: false,
    };
    dfs.run(0, 1.0, 0.0);
    let proven = !dfs.aborted;
    Priced {
        value: dfs.best_value,
        upper_bound: if proven { dfs.best_value } else { root_bound.max(dfs.best_value) },
        counts: dfs.best,
        proven,
    }
}

fn fractional_bound(order: &[usize], sizes: &[f64], caps: &[u64], duals: &[f64], room: f64) -> f64 {
    let mut room = room + CAPACITY_TOL;
    let mut value = 0.0;
    for &i in order {
        let take = (caps[i] as f64).min(room / sizes[i]);
        value += take * duals[i];
        room -= take * sizes[i];
        if room <= 0.0 {
            break;
        }
    }
    value
}

struct PricingSearch<'a> {
    order: &'a [usize],
    sizes: &'a [f64],
    caps: &'a [u64],
    duals: &'a [f64],
    current: Vec<u64>,
    best: Vec<u64>,
    best_value: f64,
    nodes: u64,
    aborted: bool,
}

impl PricingSearch<'_> {
    fn run(&mut self, depth: usize, room: f64, value: f64) {
        if value > self.best_value + 1e-12 {
            self.best_value = value;
            self.best = self.current.clone();
        }
        if depth == self.order.len() || self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > PRICING_NODE_LIMIT {
            self.aborted = true;
            return;
        }
        let i = self.order[depth];
        let density = self.duals[i] / self.sizes[i];
        if value + (room + CAPACITY_TOL) * density <= self.best_value + 1e-12 {
            return;
        }
        let most = copies_fitting(self.sizes[i], room).min(self.caps[i]);
        for c in (0..=most).rev() {
            self.current[i] = c;
            let used = c as f64 * self.sizes[i];
            self.run(depth + 1, room - used, value + c as f64 * self.duals[i]);
            if self.aborted {
                break;
            }
        }
        self.current[i] = 0;
    }
}
