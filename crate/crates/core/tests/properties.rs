use proptest::prelude::*;

use streampack::bp_estimate::estimate_bins;
use streampack::bp_round::{GroupedRounder, RoundingMode};
use streampack::hmbp::{solve, Solver};
use streampack::makespan::exact_makespan;
use streampack::quantiles::GkSummary;
use streampack::sched_round::{zero_small_coords, ScalarSchedSummary, VectorTypeSummary};
use streampack::vbp::{vbp_estimate, vbp_exact};
use streampack::vsched::{gamma_of, ContainerState};
use streampack::VectorItem;

/// `i` with `base^i < p ≤ base^(i+1)`, found by walking down from zero.
fn bucket(p: f64, base: f64) -> i64 {
    let mut i = 0i64;
    while base.powi(i as i32) >= p {
        i -= 1;
    }
    i
}

fn vector(d: usize) -> impl Strategy<Value = VectorItem> {
    prop::collection::vec(0.0f64..=1.0, d).prop_map(|c| VectorItem::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gk_structure(values in prop::collection::vec(0.0f64..1.0, 1..3000), delta in 0.005f64..0.5) {
        let mut gk = GkSummary::new(delta).unwrap();
        for &v in &values {
            gk.insert(v).unwrap();
        }
        let gaps: u64 = gk.tuples().iter().map(|t| t.gap).sum();
        prop_assert_eq!(gaps, values.len() as u64);
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        prop_assert_eq!(gk.tuples()[0].value, max);
        prop_assert_eq!(gk.tuples().last().unwrap().value, min);
        prop_assert!(gk.tuples().windows(2).all(|w| w[0].value >= w[1].value));
        for t in gk.tuples() {
            prop_assert!(t.gap + t.uncertainty <= gk.band());
        }
    }

    #[test]
    fn rounding_domination_and_size(
        raw in prop::collection::vec(0.0f64..1.0, 1..2000),
        eps in prop::sample::select(vec![1.0 / 3.0, 0.25, 0.2, 0.1, 0.05]),
        geometric in any::<bool>(),
    ) {
        let stream: Vec<f64> = raw.iter().map(|u| 1.0 - (1.0 - eps) * u).filter(|&x| x > eps).collect();
        let mode = if geometric { RoundingMode::Geometric } else { RoundingMode::Simple };
        let mut r = GroupedRounder::new(eps, mode).unwrap();
        for &x in &stream {
            r.insert(x).unwrap();
        }
        prop_assert_eq!(r.group_counts().iter().sum::<u64>(), stream.len() as u64);
        let ir = r.finish();
        let mut ib = stream.clone();
        ib.sort_by(|a, b| b.total_cmp(a));
        let expanded = ir.expand();
        prop_assert_eq!(expanded.len(), ib.len());
        for (a, b) in expanded.iter().zip(&ib) {
            prop_assert!(a >= b);
        }
        let size: f64 = stream.iter().sum();
        prop_assert!(ir.total_size() <= (1.0 + eps) * size * (1.0 + 1e-12));
        prop_assert!(ir.entries().windows(2).all(|w| w[0].size > w[1].size));
        prop_assert!(ir.sigma() <= r.stored_tuples());
    }

    #[test]
    fn group_membership(size in 0.0f64..1.0, eps in prop::sample::select(vec![1.0 / 3.0, 0.2, 0.1])) {
        let size = 1.0 - (1.0 - eps) * size;
        prop_assume!(size > eps);
        let r = GroupedRounder::new(eps, RoundingMode::Geometric).unwrap();
        let j = r.group_of(size) as i32;
        let last = r.k() as i32 - 1;
        prop_assert!(size <= 2f64.powi(-j));
        if j < last {
            prop_assert!(size > 2f64.powi(-j - 1));
        }
    }

    #[test]
    fn estimate_is_at_least_total_size(
        stream in prop::collection::vec(0.001f64..=1.0, 1..500),
        solver in prop::sample::select(vec![Solver::Ffd, Solver::Gg]),
    ) {
        let est = estimate_bins(&stream, 0.2, RoundingMode::Geometric, solver).unwrap();
        let size: f64 = stream.iter().sum();
        prop_assert!(est.bins as f64 >= size - 1e-9);
        let inst = streampack::bp_round::RoundedInstance::from_items(&stream).unwrap();
        prop_assert!(solve(&inst, Solver::Ffd).unwrap().is_valid_for(&inst));
    }

    #[test]
    fn scalar_counters_are_exact(
        exps in prop::collection::vec(-6.0f64..0.0, 1..300),
        eps in prop::sample::select(vec![0.1, 0.2, 0.5]),
    ) {
        let jobs: Vec<f64> = exps.iter().map(|e| 10f64.powf(*e)).collect();
        let mut s = ScalarSchedSummary::new(eps).unwrap();
        for &p in &jobs {
            s.process(p).unwrap();
        }
        let base = 1.0 + eps;
        let q = s.q().unwrap();
        prop_assert_eq!(q, bucket(s.p_max(), base));
        let counted: u64 = s.counters().iter().map(|c| c.1).sum();
        prop_assert_eq!(counted + s.jobs_in_small_volume(), jobs.len() as u64);
        for (i, c) in s.counters() {
            let expected = jobs.iter().filter(|&&p| bucket(p, base) == i).count() as u64;
            prop_assert_eq!(c, expected);
        }
        let small: f64 = jobs.iter().filter(|&&p| bucket(p, base) < q - s.k()).sum();
        prop_assert!(s.small_total() >= small * (1.0 - 1e-12));
        prop_assert!(s.small_total() <= (1.0 + eps) * small * (1.0 + 1e-12));
    }

    #[test]
    fn vector_types_stay_bounded(
        jobs in prop::collection::vec((prop::collection::vec(0.0f64..=1.0, 3), -4.0f64..0.0), 1..200),
    ) {
        let mut s = VectorTypeSummary::new(3, 0.2).unwrap();
        let mut seen_small = std::collections::BTreeSet::new();
        for (coords, e) in &jobs {
            let scale = 10f64.powf(*e);
            let v = VectorItem::new(coords.iter().map(|c| c * scale).collect()).unwrap();
            s.process(&v).unwrap();
            prop_assert!(s.big_types().len() as f64 <= s.big_type_bound());
            let keys: std::collections::BTreeSet<_> = s.small_masses().keys().cloned().collect();
            prop_assert!(seen_small.is_subset(&keys));
            seen_small = keys;
        }
    }

    #[test]
    fn zeroing_loses_at_most_eps_norm(v in vector(4), eps in 0.01f64..1.0) {
        let d = 4.0;
        let z = zero_small_coords(&v, eps / d);
        let lost: f64 = v.coords().iter().zip(z.coords()).map(|(a, b)| a - b).sum();
        prop_assert!(lost <= eps * v.norm_inf() + 1e-12);
        prop_assert_eq!(z.norm_inf(), v.norm_inf());
    }

    #[test]
    fn zeroed_schedule_transfers(jobs in prop::collection::vec(vector(2), 1..8), m in 1usize..=3) {
        let eps = 0.3;
        let zeroed: Vec<VectorItem> = jobs.iter().map(|v| zero_small_coords(v, eps / 2.0)).collect();
        let a = exact_makespan(&zeroed, m, 14).unwrap();
        let mut loads = vec![[0.0f64; 2]; m];
        for (v, &i) in jobs.iter().zip(&a.machine_of) {
            loads[i][0] += v.coords()[0];
            loads[i][1] += v.coords()[1];
        }
        let back = loads.iter().flatten().copied().fold(0.0, f64::max);
        prop_assert!(back <= (1.0 + eps) * a.makespan + 1e-12);
    }

    #[test]
    fn container_summary_conserves_volume(
        jobs in prop::collection::vec((vector(3), any::<bool>()), 1..400),
        m in 2usize..=4,
    ) {
        let eps = 0.5;
        let gamma = gamma_of(eps, 3);
        let mut st = ContainerState::new(m, 3, eps).unwrap();
        let mut totals = [0.0f64; 3];
        for (v, tiny) in &jobs {
            let v = if *tiny { v.scaled(gamma * 0.3) } else { v.clone() };
            for k in 0..3 {
                totals[k] += v.coords()[k];
            }
            st.process_job(&v).unwrap();
        }
        let s = st.summarize();
        for k in 0..3 {
            let sum: f64 = s.jobs.iter().map(|j| j.coords()[k]).sum();
            prop_assert!((sum - totals[k]).abs() <= 1e-9 * jobs.len() as f64);
        }
        prop_assert!((s.big_count + s.container_count) as f64 <= 3.0 * m as f64 / gamma + 1.0);
    }

    #[test]
    fn linf_reduction_is_feasible(jobs in prop::collection::vec(vector(2), 1..10)) {
        let est = vbp_estimate(&jobs, 2, 0.5, RoundingMode::Geometric, Solver::Exact).unwrap();
        let opt = vbp_exact(&jobs, 12).unwrap();
        prop_assert!(est.bins >= opt);
        let reduced: Vec<VectorItem> = jobs.iter().map(|v| VectorItem::new(vec![v.norm_inf()]).unwrap()).collect();
        prop_assert!(vbp_exact(&reduced, 12).unwrap() <= 2 * opt);
    }
}
