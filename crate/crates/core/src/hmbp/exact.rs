use crate::bp_round::RoundedInstance;
use crate::error::{Error, Result};
use crate::numeric::ceil_tol;
use crate::CAPACITY_TOL;

use super::{check_feasible, PackingSolution, Pattern, PatternUse};

pub const DEFAULT_EXACT_ITEM_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy)]
pub(crate) struct ExactLimits {
    pub items: usize,
    pub nodes: u64,
}

impl ExactLimits {
    pub fn items(items: usize) -> Self {
        Self { items, nodes: 200_000_000 }
    }
}

/// Optimal number of unit bins for `items` (all of dimension `d`), with the
/// item indices packed into each bin.
///
/// Branch and bound over assignments in decreasing item order. First fit
/// decreasing gives the initial incumbent; a node is pruned when the open bins
/// plus the uncovered volume in the tightest dimension cannot beat it. Bins
/// with identical loads are tried once, and an item equal to its predecessor
/// never goes into an earlier bin than the predecessor did.
pub(crate) fn pack_exact(items: &[Vec<f64>], limits: ExactLimits) -> Result<Vec<Vec<usize>>> {
    if items.len() > limits.items {
        return Err(Error::OracleScale { items: items.len(), limit: limits.items });
    }
    if items.is_empty() {
        return Ok(Vec::new());
    }
    let d = items[0].len();
    for v in items {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
        if let Some(&c) = v.iter().find(|&&c| c > 1.0 + CAPACITY_TOL) {
            return Err(Error::InfeasibleItem { size: c });
        }
    }

    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        let ka = items[a].iter().sum::<f64>();
        let kb = items[b].iter().sum::<f64>();
        kb.total_cmp(&ka).then_with(|| lexicographic(&items[b], &items[a]))
    });
    let sorted: Vec<&[f64]> = order.iter().map(|&i| items[i].as_slice()).collect();

    let incumbent = first_fit(&sorted, d);
    let mut search = Search {
        items: &sorted,
        d,
        same_as_prev: (0..sorted.len()).map(|i| i > 0 && sorted[i] == sorted[i - 1]).collect(),
        suffix_volume: suffix_volumes(&sorted, d),
        loads: Vec::new(),
        assign: vec![0; sorted.len()],
        best_bins: incumbent.iter().copied().max().map_or(0, |m| m + 1),
        best_assign: incumbent,
        nodes: 0,
        node_limit: limits.nodes,
    };
    let lower = (0..d).map(|k| ceil_tol(search.suffix_volume[0][k])).max().unwrap_or(0).max(1) as usize;
    if search.best_bins > lower {
        search.dfs(0, lower)?;
    }

    let mut bins = vec![Vec::new(); search.best_bins];
    for (pos, &b) in search.best_assign.iter().enumerate() {
        bins[b].push(order[pos]);
    }
    Ok(bins)
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn fits(load: &[f64], item: &[f64]) -> bool {
    load.iter().zip(item).all(|(l, x)| l + x <= 1.0 + CAPACITY_TOL)
}

fn first_fit(items: &[&[f64]], d: usize) -> Vec<usize> {
    let mut loads: Vec<Vec<f64>> = Vec::new();
    let mut assign = Vec::with_capacity(items.len());
    for item in items {
        let b = match loads.iter().position(|l| fits(l, item)) {
            Some(b) => b,
            None => {
                loads.push(vec![0.0; d]);
                loads.len() - 1
            }
        };
        for (l, x) in loads[b].iter_mut().zip(item.iter()) {
            *l += x;
        }
        assign.push(b);
    }
    assign
}

fn suffix_volumes(items: &[&[f64]], d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d]; items.len() + 1];
    for i in (0..items.len()).rev() {
        for k in 0..d {
            out[i][k] = out[i + 1][k] + items[i][k];
        }
    }
    out
}

struct Search<'a> {
    items: &'a [&'a [f64]],
    d: usize,
    same_as_prev: Vec<bool>,
    suffix_volume: Vec<Vec<f64>>,
    loads: Vec<Vec<f64>>,
    assign: Vec<usize>,
    best_bins: usize,
    best_assign: Vec<usize>,
    nodes: u64,
    node_limit: u64,
}

impl Search<'_> {
    /// Returns `true` once a packing into `target` bins is found.
    fn dfs(&mut self, pos: usize, target: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::SolverLimit {
                iterations: self.nodes as usize,
                best_bins: self.best_bins as u64,
            });
        }
        if pos == self.items.len() {
            self.best_bins = self.loads.len();
            self.best_assign = self.assign.clone();
            return Ok(self.best_bins <= target);
        }
        let open = self.loads.len();
        let needed = (0..self.d)
            .map(|k| {
                let free: f64 = self.loads.iter().map(|l| (1.0 - l[k]).max(0.0)).sum();
                ceil_tol(self.suffix_volume[pos][k] - free)
            })
            .max()
            .unwrap_or(0) as usize;
        if open + needed >= self.best_bins {
            return Ok(false);
        }

        let item = self.items[pos];
        let first_bin = if self.same_as_prev[pos] { self.assign[pos - 1] } else { 0 };
        for b in first_bin..open {
            if !fits(&self.loads[b], item) {
                continue;
            }
            if (first_bin..b).any(|c| self.loads[c] == self.loads[b]) {
                continue;
            }
            for k in 0..self.d {
                self.loads[b][k] += item[k];
            }
            self.assign[pos] = b;
            let done = self.dfs(pos + 1, target)?;
            for k in 0..self.d {
                self.loads[b][k] -= item[k];
            }
            if done {
                return Ok(true);
            }
        }
        if open + 1 < self.best_bins {
            self.loads.push(item.to_vec());
            self.assign[pos] = open;
            let done = self.dfs(pos + 1, target)?;
            self.loads.pop();
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `OPT` of the instance, by branch and bound on the expanded items.
pub fn solve_exact(instance: &RoundedInstance, item_limit: usize) -> Result<u64> {
    solve_exact_packing(instance, item_limit).map(|s| s.bins_used())
}

/// An optimal packing of the instance.
pub fn solve_exact_packing(instance: &RoundedInstance, item_limit: usize) -> Result<PackingSolution> {
    check_feasible(instance)?;
    let total = instance.total_items();
    if total > item_limit as u64 {
        return Err(Error::OracleScale { items: total as usize, limit: item_limit });
    }
    let mut class_of = Vec::with_capacity(total as usize);
    let mut items = Vec::with_capacity(total as usize);
    for (i, e) in instance.entries().iter().enumerate() {
        for _ in 0..e.multiplicity {
            class_of.push(i);
            items.push(vec![e.size]);
        }
    }
    let bins = pack_exact(&items, ExactLimits::items(item_limit))?;
    let uses = bins
        .into_iter()
        .map(|bin| {
            let mut counts = vec![0; instance.sigma()];
            for idx in bin {
                counts[class_of[idx]] += 1;
            }
            let pattern = Pattern { counts };
            let fill = pattern.fill(instance);
            PatternUse { pattern, uses: 1, fill }
        })
        .collect();
    Ok(PackingSolution::from_uses(uses))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(pairs: &[(f64, u64)]) -> RoundedInstance {
        RoundedInstance::from_pairs(pairs.iter().copied()).unwrap()
    }

    /// Tries every assignment of items to at most `n` bins.
    fn brute_force(items: &[f64]) -> usize {
        let n = items.len();
        let mut best = n;
        let mut assign = vec![0usize; n];
        loop {
            let bins = assign.iter().copied().max().map_or(0, |m| m + 1);
            let mut loads = vec![0.0; bins];
            for (i, &b) in assign.iter().enumerate() {
                loads[b] += items[i];
            }
            if loads.iter().all(|&l| l <= 1.0 + CAPACITY_TOL) {
                best = best.min(bins);
            }
            let mut i = 0;
            while i < n {
                assign[i] += 1;
                if assign[i] < n {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
            if i == n {
                return best;
            }
        }
    }

    #[test]
    fn small_known_optima() {
        assert_eq!(solve_exact(&inst(&[(0.6, 2)]), 24).unwrap(), 2);
        assert_eq!(solve_exact(&inst(&[(0.34, 3)]), 24).unwrap(), 2);
        assert_eq!(solve_exact(&inst(&[(0.7, 3), (0.3, 3)]), 24).unwrap(), 3);
    }

    #[test]
    fn beats_first_fit_decreasing() {
        // FFD opens {0.4,0.4}, {0.3,0.3,0.3}, {0.3}; OPT pairs each 0.4 with two 0.3.
        let instance = inst(&[(0.4, 2), (0.3, 4)]);
        assert_eq!(super::super::solve_ffd(&instance).unwrap().bins_used(), 3);
        let sol = solve_exact_packing(&instance, 24).unwrap();
        assert_eq!(sol.bins_used(), 2);
        assert!(sol.is_valid_for(&instance));
    }

    #[test]
    fn scale_limit_is_enforced() {
        assert_eq!(
            solve_exact(&inst(&[(0.1, 30)]), 24),
            Err(Error::OracleScale { items: 30, limit: 24 })
        );
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=7);
            let items: Vec<f64> = (0..n).map(|_| (rng.gen_range(5..=95) as f64) / 100.0).collect();
            let expected = brute_force(&items);
            let got = solve_exact(&RoundedInstance::from_items(&items).unwrap(), 24).unwrap();
            assert_eq!(got as usize, expected, "{items:?}");
        }
    }

    #[test]
    fn vector_items() {
        let bins = pack_exact(&[vec![0.6, 0.1], vec![0.1, 0.6]], ExactLimits::items(12)).unwrap();
        assert_eq!(bins.len(), 1);
        let bins = pack_exact(&[vec![0.6, 0.6], vec![0.6, 0.1]], ExactLimits::items(12)).unwrap();
        assert_eq!(bins.len(), 2);
    }
}
