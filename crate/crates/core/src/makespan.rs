//! Makespan oracles for (vector) scheduling on identical machines.
//!
//! Jobs are slices of `d` non-negative loads; the makespan of an assignment is
//! the largest load over all machines and dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_JOB_LIMIT: usize = 14;

const NODE_LIMIT: u64 = 50_000_000;
const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Machine of every job, in input order.
    pub machine_of: Vec<usize>,
    /// Per-machine, per-dimension loads.
    pub loads: Vec<Vec<f64>>,
    pub makespan: f64,
}

fn dimension(jobs: &[impl AsRef<[f64]>]) -> Result<usize> {
    let d = jobs.first().map_or(1, |j| j.as_ref().len());
    for j in jobs {
        if j.as_ref().len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: j.as_ref().len() });
        }
    }
    Ok(d)
}

fn check_machines(m: usize) -> Result<()> {
    if m == 0 {
        Err(Error::Config("machine count must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn max_load(loads: &[Vec<f64>]) -> f64 {
    loads.iter().flatten().fold(0.0, |a, &b| a.max(b))
}

/// Places the jobs in the given order, each on the machine that increases the
/// global makespan least; ties go to the lowest machine index.
pub fn greedy_min_makespan(jobs: &[impl AsRef<[f64]>], m: usize) -> Result<Assignment> {
    check_machines(m)?;
    let d = dimension(jobs)?;
    let mut loads = vec![vec![0.0; d]; m];
    let mut machine_of = Vec::with_capacity(jobs.len());
    let mut current = 0.0f64;
    for job in jobs {
        let job = job.as_ref();
        let mut best = (f64::INFINITY, 0);
        for (i, l) in loads.iter().enumerate() {
            let peak = l.iter().zip(job).map(|(a, b)| a + b).fold(current, f64::max);
            if peak < best.0 - TOL {
                best = (peak, i);
            }
        }
        let i = best.1;
        for (a, b) in loads[i].iter_mut().zip(job) {
            *a += b;
        }
        current = current.max(best.0);
        machine_of.push(i);
    }
    let makespan = max_load(&loads);
    Ok(Assignment { machine_of, loads, makespan })
}

/// Longest processing time first for scalar jobs.
pub fn lpt_makespan(jobs: &[f64], m: usize) -> Result<f64> {
    check_machines(m)?;
    let mut sorted = jobs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut loads = vec![0.0f64; m];
    for p in sorted {
        let i = (0..m).min_by(|&a, &b| loads[a].total_cmp(&loads[b])).expect("m ≥ 1");
        loads[i] += p;
    }
    Ok(loads.into_iter().fold(0.0, f64::max))
}

/// `max(max_k Σ_j v_jk / m, max_j ‖v_j‖∞)`.
pub fn volume_lower_bound(jobs: &[impl AsRef<[f64]>], m: usize) -> f64 {
    let d = jobs.first().map_or(0, |j| j.as_ref().len());
    let mut totals = vec![0.0; d];
    let mut largest = 0.0f64;
    for j in jobs {
        for (t, &x) in totals.iter_mut().zip(j.as_ref()) {
            *t += x;
            largest = largest.max(x);
        }
    }
    totals.iter().map(|t| t / m as f64).fold(largest, f64::max)
}

/// Optimal makespan by branch and bound.
///
/// Jobs are assigned largest first; machines with identical loads are tried
/// once, a branch is cut as soon as some load reaches the incumbent, and the
/// search stops when the incumbent meets the volume bound.
pub fn exact_makespan(jobs: &[impl AsRef<[f64]>], m: usize, job_limit: usize) -> Result<Assignment> {
    check_machines(m)?;
    if jobs.len() > job_limit {
        return Err(Error::OracleScale { items: jobs.len(), limit: job_limit });
    }
    let d = dimension(jobs)?;
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    let key = |j: usize| {
        let v = jobs[j].as_ref();
        (v.iter().fold(0.0f64, |a, &b| a.max(b)), v.iter().sum::<f64>())
    };
    order.sort_by(|&a, &b| {
        let (na, sa) = key(a);
        let (nb, sb) = key(b);
        nb.total_cmp(&na).then(sb.total_cmp(&sa))
    });
    let sorted: Vec<&[f64]> = order.iter().map(|&j| jobs[j].as_ref()).collect();

    let greedy = greedy_min_makespan(&sorted, m)?;
    let lower = volume_lower_bound(&sorted, m);
    let mut search = MakespanSearch {
        jobs: &sorted,
        m,
        lower,
        loads: vec![vec![0.0; d]; m],
        assign: vec![0; sorted.len()],
        best: greedy.makespan,
        best_assign: greedy.machine_of,
        nodes: 0,
    };
    if search.best > lower + TOL {
        search.dfs(0, 0.0)?;
    }

    let mut machine_of = vec![0; jobs.len()];
    let mut loads = vec![vec![0.0; d]; m];
    for (pos, &i) in search.best_assign.iter().enumerate() {
        machine_of[order[pos]] = i;
        for (a, b) in loads[i].iter_mut().zip(sorted[pos]) {
            *a += b;
        }
    }
    let makespan = max_load(&loads);
    Ok(Assignment { machine_of, loads, makespan })
}

struct MakespanSearch<'a> {
    jobs: &'a [&'a [f64]],
    m: usize,
    lower: f64,
    loads: Vec<Vec<f64>>,
    assign: Vec<usize>,
    best: f64,
    best_assign: Vec<usize>,
    nodes: u64,
}

impl MakespanSearch<'_> {
    /// Returns `true` once the incumbent meets the lower bound.
    fn dfs(&mut self, pos: usize, current: f64) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(Error::SolverLimit { iterations: self.nodes as usize, best_bins: 0 });
        }
        if pos == self.jobs.len() {
            self.best = current;
            self.best_assign = self.assign.clone();
            return Ok(self.best <= self.lower + TOL);
        }
        let job = self.jobs[pos];
        for i in 0..self.m {
            if (0..i).any(|h| self.loads[h] == self.loads[i]) {
                continue;
            }
            let peak = self.loads[i].iter().zip(job).map(|(a, b)| a + b).fold(current, f64::max);
            if peak >= self.best - TOL {
                continue;
            }
            let saved = self.loads[i].clone();
            for (a, b) in self.loads[i].iter_mut().zip(job) {
                *a += b;
            }
            self.assign[pos] = i;
            let done = self.dfs(pos + 1, peak)?;
            self.loads[i] = saved;
            if done {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Every assignment of jobs to machines.
    fn brute_force(jobs: &[Vec<f64>], m: usize) -> f64 {
        let n = jobs.len();
        let d = jobs[0].len();
        let mut best = f64::INFINITY;
        let mut assign = vec![0usize; n];
        loop {
            let mut loads = vec![vec![0.0; d]; m];
            for (j, &i) in assign.iter().enumerate() {
                for k in 0..d {
                    loads[i][k] += jobs[j][k];
                }
            }
            best = best.min(max_load(&loads));
            let mut j = 0;
            while j < n {
                assign[j] += 1;
                if assign[j] < m {
                    break;
                }
                assign[j] = 0;
                j += 1;
            }
            if j == n {
                return best;
            }
        }
    }

    #[test]
    fn greedy_small_examples() {
        let a = greedy_min_makespan(&[[1.0], [1.0]], 2).unwrap();
        assert_eq!(a.machine_of, vec![0, 1]);
        assert_eq!(a.makespan, 1.0);
        let a = greedy_min_makespan(&[[0.5], [0.5], [0.5]], 2).unwrap();
        assert_eq!(a.makespan, 1.0);
    }

    #[test]
    fn greedy_ties_go_to_lowest_index() {
        let a = greedy_min_makespan(&[[0.2, 0.1], [0.1, 0.1]], 3).unwrap();
        assert_eq!(a.machine_of, vec![0, 1]);
    }

    #[test]
    fn exact_single_job() {
        let a = exact_makespan(&[[0.3, 0.7]], 3, DEFAULT_JOB_LIMIT).unwrap();
        assert_eq!(a.makespan, 0.7);
    }

    #[test]
    fn exact_limit() {
        let jobs = vec![[0.1]; 20];
        assert_eq!(
            exact_makespan(&jobs, 2, DEFAULT_JOB_LIMIT).unwrap_err(),
            Error::OracleScale { items: 20, limit: DEFAULT_JOB_LIMIT }
        );
        assert!(matches!(greedy_min_makespan(&jobs, 0), Err(Error::Config(_))));
    }

    #[test]
    fn exact_and_greedy_against_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.gen_range(1..=8);
            let d = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            let jobs: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect();
            let opt = brute_force(&jobs, m);
            let exact = exact_makespan(&jobs, m, DEFAULT_JOB_LIMIT).unwrap();
            assert!((exact.makespan - opt).abs() < 1e-9, "{jobs:?} m={m}");
            let greedy = greedy_min_makespan(&jobs, m).unwrap();
            assert!(greedy.makespan >= opt - 1e-9);
        }
    }

    #[test]
    fn lpt_is_within_four_thirds() {
        let jobs = [0.3, 0.3, 0.2, 0.2, 0.2];
        let opt = exact_makespan(&jobs.map(|p| [p]), 2, DEFAULT_JOB_LIMIT).unwrap().makespan;
        let lpt = lpt_makespan(&jobs, 2).unwrap();
        assert!((opt - 0.6).abs() < 1e-12);
        assert!((lpt - 0.7).abs() < 1e-12);
    }
}
