use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::VectorItem;

pub const DEFAULT_PLACEMENT_ATTEMPTS: usize = 64;

const TOL: f64 = 1e-9;

/// Container assignment found by [`place_containers`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub machine_of: Vec<usize>,
    /// Containers that went through the greedy part.
    pub greedy_placed: Vec<bool>,
    /// Per-machine, per-dimension load of both parts together.
    pub loads: Vec<Vec<f64>>,
    /// `max(1/2, L^C_k/m) + 2ε + 4γ` for every dimension.
    pub bound: Vec<f64>,
    pub seed_used: u64,
    pub attempts: usize,
}

impl Placement {
    /// Largest `load − bound` over machines and dimensions (non-positive on success).
    pub fn excess(&self) -> f64 {
        excess(&self.loads, &self.bound)
    }
}

fn excess(loads: &[Vec<f64>], bound: &[f64]) -> f64 {
    loads
        .iter()
        .flat_map(|l| l.iter().zip(bound).map(|(x, b)| x - b))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Places normalized containers (`max_k L_k / m = 1`, every norm `≤ 2γ`) on `m`
/// machines.
///
/// Each machine has two parts. A container first goes to a uniformly random
/// machine and stays in its first part if that part remains within
/// `L'_k + ε + 2γ` in every dimension, where `L'_k = max(1/2, L^C_k/m)`.
/// Otherwise it is handed to the second part, filled greedily so that the
/// makespan of the second parts grows least. An attempt succeeds when every
/// machine stays within `L'_k + 2ε + 4γ`; attempts use seeds `seed`,
/// `seed + 1`, … up to `attempts` of them.
pub fn place_containers(
    containers: &[VectorItem],
    m: usize,
    epsilon: f64,
    gamma: f64,
    seed: u64,
    attempts: usize,
) -> Result<Placement> {
    if m == 0 {
        return Err(Error::Config("machine count must be at least 1".into()));
    }
    let d = containers.first().map_or(1, VectorItem::dim);
    if let Some(c) = containers.iter().find(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
    }
    let mut totals = vec![0.0; d];
    for c in containers {
        for (t, &x) in totals.iter_mut().zip(c.coords()) {
            *t += x;
        }
    }
    let base: Vec<f64> = totals.iter().map(|t| (t / m as f64).max(0.5)).collect();
    let random_cap: Vec<f64> = base.iter().map(|b| b + epsilon + 2.0 * gamma).collect();
    let bound: Vec<f64> = base.iter().map(|b| b + 2.0 * epsilon + 4.0 * gamma).collect();

    let mut best_excess = f64::INFINITY;
    for attempt in 0..attempts.max(1) {
        let seed_used = seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed_used);
        let mut random_part = vec![vec![0.0; d]; m];
        let mut greedy_part = vec![vec![0.0; d]; m];
        let mut greedy_peak = 0.0f64;
        let mut machine_of = Vec::with_capacity(containers.len());
        let mut greedy_placed = Vec::with_capacity(containers.len());
        for c in containers {
            let i = rng.gen_range(0..m);
            let fits = random_part[i]
                .iter()
                .zip(c.coords())
                .zip(&random_cap)
                .all(|((l, x), cap)| l + x <= cap + TOL);
            if fits {
                for (l, x) in random_part[i].iter_mut().zip(c.coords()) {
                    *l += x;
                }
                machine_of.push(i);
                greedy_placed.push(false);
                continue;
            }
            let mut choice = (f64::INFINITY, 0);
            for (h, l) in greedy_part.iter().enumerate() {
                let peak = l.iter().zip(c.coords()).map(|(a, b)| a + b).fold(greedy_peak, f64::max);
                if peak < choice.0 - 1e-15 {
                    choice = (peak, h);
                }
            }
            let h = choice.1;
            for (l, x) in greedy_part[h].iter_mut().zip(c.coords()) {
                *l += x;
            }
            greedy_peak = greedy_peak.max(choice.0);
            machine_of.push(h);
            greedy_placed.push(true);
        }
        let loads: Vec<Vec<f64>> = random_part
            .iter()
            .zip(&greedy_part)
            .map(|(r, g)| r.iter().zip(g).map(|(a, b)| a + b).collect())
            .collect();
        let e = excess(&loads, &bound);
        if e <= TOL {
            return Ok(Placement {
                machine_of,
                greedy_placed,
                loads,
                bound,
                seed_used,
                attempts: attempt + 1,
            });
        }
        best_excess = best_excess.min(e);
    }
    Err(Error::PlacementFailure { attempts: attempts.max(1), best_excess })
}
