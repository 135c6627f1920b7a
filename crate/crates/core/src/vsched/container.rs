use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::makespan::{exact_makespan, greedy_min_makespan};
use crate::numeric::CompensatedSum;
use crate::streams::MemoryReport;
use crate::vector::VectorItem;

use super::{check_vsched_epsilon, gamma_of};

/// Rescaling only happens when `T` grows by more than this factor.
const GROWTH_FACTOR: f64 = 1.0 + 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContainerState {
    m: usize,
    d: usize,
    epsilon: f64,
    gamma: f64,
    loads: Vec<CompensatedSum>,
    /// `T` at the last rescale.
    scale: f64,
    /// Sorted by norm, ascending.
    big_jobs: Vec<VectorItem>,
    /// Sorted by norm, ascending.
    closed: Vec<VectorItem>,
    open: Option<VectorItem>,
    jobs_seen: u64,
    peak_stored: u64,
}

/// Big jobs and containers standing in for the stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VsSummary {
    pub jobs: Vec<VectorItem>,
    pub big_count: usize,
    /// Closed containers plus the open one, if any.
    pub container_count: usize,
    /// `L^C_k`.
    pub container_loads: Vec<f64>,
    /// `L_k`.
    pub loads: Vec<f64>,
    pub gamma: f64,
    pub m: usize,
    pub d: usize,
    pub epsilon: f64,
}

impl VsSummary {
    /// `T = max_k L_k / m`.
    pub fn scale(&self) -> f64 {
        self.loads.iter().fold(0.0f64, |a, &b| a.max(b)) / self.m as f64
    }

    /// Containers only, divided by `T`.
    pub fn normalized_containers(&self) -> Vec<VectorItem> {
        let t = self.scale();
        if t == 0.0 {
            return Vec::new();
        }
        self.jobs[self.big_count..].iter().map(|c| c.scaled(1.0 / t)).collect()
    }

    /// Makespan of the summary instance: `max_k L_k` for one machine, the exact
    /// optimum up to `exact_limit` jobs, greedy above it.
    pub fn makespan_estimate(&self, exact_limit: usize) -> Result<(f64, &'static str)> {
        if self.m == 1 {
            return Ok((self.loads.iter().fold(0.0f64, |a, &b| a.max(b)), "total-load"));
        }
        if self.jobs.len() <= exact_limit {
            Ok((exact_makespan(&self.jobs, self.m, exact_limit)?.makespan, "exact"))
        } else {
            Ok((greedy_min_makespan(&self.jobs, self.m)?.makespan, "greedy"))
        }
    }
}

fn norm_position(sorted: &[VectorItem], norm: f64) -> usize {
    sorted.partition_point(|v| v.norm_inf() <= norm)
}

impl ContainerState {
    pub fn new(m: usize, d: usize, epsilon: f64) -> Result<Self> {
        check_vsched_epsilon(epsilon)?;
        Self::with_gamma(m, d, epsilon, gamma_of(epsilon, d))
    }

    /// A state with an explicit threshold factor `γ ∈ (0, 1)`.
    pub fn with_gamma(m: usize, d: usize, epsilon: f64, gamma: f64) -> Result<Self> {
        if m == 0 || d == 0 {
            return Err(Error::Config("machine count and dimension must be at least 1".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Config(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        Ok(Self {
            m,
            d,
            epsilon,
            gamma,
            loads: vec![CompensatedSum::default(); d],
            scale: 0.0,
            big_jobs: Vec::new(),
            closed: Vec::new(),
            open: None,
            jobs_seen: 0,
            peak_stored: 0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn loads(&self) -> Vec<f64> {
        self.loads.iter().map(CompensatedSum::value).collect()
    }

    /// Current `T = max_k L_k / m`.
    pub fn scale(&self) -> f64 {
        self.loads().into_iter().fold(0.0, f64::max) / self.m as f64
    }

    /// Current threshold `γ·T`.
    pub fn threshold(&self) -> f64 {
        self.gamma * self.scale
    }

    pub fn big_jobs(&self) -> &[VectorItem] {
        &self.big_jobs
    }

    pub fn closed_containers(&self) -> &[VectorItem] {
        &self.closed
    }

    pub fn open_container(&self) -> Option<&VectorItem> {
        self.open.as_ref()
    }

    fn stored(&self) -> u64 {
        (self.big_jobs.len() + self.closed.len() + usize::from(self.open.is_some())) as u64
    }

    pub fn memory(&self) -> MemoryReport {
        MemoryReport::new(self.stored(), self.peak_stored, self.jobs_seen)
    }

    pub fn process_job(&mut self, v: &VectorItem) -> Result<()> {
        if v.dim() != self.d {
            return Err(Error::RejectedInput(format!(
                "job has {} coordinates, expected {}",
                v.dim(),
                self.d
            )));
        }
        for (l, &x) in self.loads.iter_mut().zip(v.coords()) {
            l.add(x);
        }
        self.jobs_seen += 1;
        let t = self.scale();
        if t > self.scale * GROWTH_FACTOR {
            self.rescale(t);
        }

        let threshold = self.threshold();
        if v.norm_inf() > threshold {
            let pos = norm_position(&self.big_jobs, v.norm_inf());
            self.big_jobs.insert(pos, v.clone());
        } else {
            let mut c = self.open.take().unwrap_or_else(|| VectorItem::zeros(self.d));
            c.add_assign(v);
            self.settle(c, threshold);
        }
        self.peak_stored = self.peak_stored.max(self.stored());
        Ok(())
    }

    /// Closes `c` if it exceeds the threshold, otherwise keeps it open.
    fn settle(&mut self, c: VectorItem, threshold: f64) {
        if c.norm_inf() > threshold {
            let pos = norm_position(&self.closed, c.norm_inf());
            self.closed.insert(pos, c);
        } else {
            self.open = Some(c);
        }
    }

    fn rescale(&mut self, t: f64) {
        self.scale = t;
        let threshold = self.gamma * t;
        let reopened = norm_position(&self.closed, threshold);
        let demoted = norm_position(&self.big_jobs, threshold);
        if reopened == 0 && demoted == 0 {
            return;
        }
        let mut pieces: Vec<VectorItem> = self.closed.drain(..reopened).collect();
        pieces.extend(self.big_jobs.drain(..demoted));
        pieces.extend(self.open.take());
        pieces.sort_by(|a, b| a.norm_inf().total_cmp(&b.norm_inf()));

        let mut current: Option<VectorItem> = None;
        for piece in pieces {
            let mut c = current.take().unwrap_or_else(|| VectorItem::zeros(self.d));
            c.add_assign(&piece);
            if c.norm_inf() > threshold {
                let pos = norm_position(&self.closed, c.norm_inf());
                self.closed.insert(pos, c);
            } else {
                current = Some(c);
            }
        }
        self.open = current;
    }

    pub fn summarize(&self) -> VsSummary {
        let mut jobs = self.big_jobs.clone();
        let big_count = jobs.len();
        jobs.extend(self.closed.iter().cloned());
        jobs.extend(self.open.iter().cloned());
        let mut container_loads = vec![CompensatedSum::default(); self.d];
        for c in &jobs[big_count..] {
            for (l, &x) in container_loads.iter_mut().zip(c.coords()) {
                l.add(x);
            }
        }
        VsSummary {
            container_count: jobs.len() - big_count,
            jobs,
            big_count,
            container_loads: container_loads.iter().map(CompensatedSum::value).collect(),
            loads: self.loads(),
            gamma: self.gamma,
            m: self.m,
            d: self.d,
            epsilon: self.epsilon,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vi(c: &[f64]) -> VectorItem {
        VectorItem::new(c.to_vec()).unwrap()
    }

    #[test]
    fn first_job_is_big() {
        let mut st = ContainerState::with_gamma(2, 2, 0.5, 0.1).unwrap();
        st.process_job(&vi(&[1.0, 0.0])).unwrap();
        assert!((st.threshold() - 0.05).abs() < 1e-15);
        assert_eq!(st.big_jobs().len(), 1);
        assert!(st.open_container().is_none());
    }

    #[test]
    fn small_jobs_share_the_open_container() {
        let mut st = ContainerState::with_gamma(2, 2, 0.5, 0.1).unwrap();
        st.process_job(&vi(&[1.0, 0.0])).unwrap();
        let threshold = st.threshold();
        // Load stays below the first dimension, so T does not move.
        st.process_job(&vi(&[0.0, threshold / 2.0])).unwrap();
        st.process_job(&vi(&[0.0, threshold / 2.0])).unwrap();
        assert_eq!(st.threshold(), threshold);
        assert!(st.closed_containers().is_empty());
        assert_eq!(st.open_container(), Some(&vi(&[0.0, threshold])));
    }

    #[test]
    fn m_equal_one_estimate_is_total_load() {
        let mut st = ContainerState::new(1, 2, 0.5).unwrap();
        for v in [[0.3, 0.1], [0.2, 0.6], [0.05, 0.05]] {
            st.process_job(&vi(&v)).unwrap();
        }
        let (est, how) = st.summarize().makespan_estimate(14).unwrap();
        assert_eq!(how, "total-load");
        assert!((est - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let mut st = ContainerState::new(2, 3, 0.5).unwrap();
        assert!(matches!(st.process_job(&vi(&[0.1, 0.2])), Err(Error::RejectedInput(_))));
        assert!(ContainerState::new(2, 3, 1.5).is_err());
    }

    #[test]
    fn single_job_summary() {
        let mut st = ContainerState::new(2, 2, 0.5).unwrap();
        st.process_job(&vi(&[0.4, 0.2])).unwrap();
        let s = st.summarize();
        assert_eq!(s.jobs, vec![vi(&[0.4, 0.2])]);
        assert_eq!(s.big_count, 1);
    }

    fn check_invariants(st: &ContainerState) -> std::result::Result<(), TestCaseError> {
        let thr = st.threshold();
        let slack = 1e-9 * (1.0 + thr);
        for b in st.big_jobs() {
            prop_assert!(b.norm_inf() > thr - slack);
        }
        for c in st.closed_containers() {
            prop_assert!(c.norm_inf() > thr - slack);
            prop_assert!(c.norm_inf() <= 2.0 * thr + slack);
        }
        if let Some(o) = st.open_container() {
            prop_assert!(o.norm_inf() <= thr + slack);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn invariants_hold_after_every_job(
            jobs in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 3), 1..200),
            m in 2usize..5,
            scale in prop::sample::select(vec![1.0, 0.1, 0.01]),
        ) {
            let mut st = ContainerState::new(m, 3, 0.5).unwrap();
            let mut totals = [0.0f64; 3];
            for j in &jobs {
                let v = VectorItem::new(j.iter().map(|x| x * scale).collect()).unwrap();
                for (t, x) in totals.iter_mut().zip(v.coords()) {
                    *t += x;
                }
                st.process_job(&v).unwrap();
                check_invariants(&st)?;
            }
            let s = st.summarize();
            for k in 0..3 {
                let sum: f64 = s.jobs.iter().map(|v| v.coords()[k]).sum();
                prop_assert!((sum - totals[k]).abs() <= 1e-9 * jobs.len() as f64);
            }
            prop_assert!((s.big_count + s.container_count - 1) as f64 <= 3.0 * m as f64 / s.gamma);
            let mem = st.memory();
            prop_assert!(mem.stored_entries <= mem.peak_entries);
            prop_assert!(mem.peak_entries <= jobs.len() as u64);
        }
    }
}
