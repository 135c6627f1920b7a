use crate::error::{Error, Result};
use crate::vector::VectorItem;

/// Stream in `d = m + 1` dimensions on which container summaries lose a
/// factor close to `2 − 1/m`.
///
/// It starts with `m` big jobs, job `i` having coordinates `i` and `m` equal
/// to one. Then come `(m − 1)/γ` rounds of `m` small jobs, the `i`-th of which
/// has coordinate `i` equal to `γ`. With every small job on a machine whose
/// big job does not use that coordinate the optimum is one.
pub fn tight_example(m: usize, gamma: f64) -> Result<Vec<VectorItem>> {
    if m < 2 {
        return Err(Error::Config("the tight example needs at least two machines".into()));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Config(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let inverse = (1.0 / gamma).round();
    if ((1.0 / gamma) - inverse).abs() > 1e-9 {
        return Err(Error::Config(format!("1/gamma must be an integer, got 1/{gamma}")));
    }
    let d = m + 1;
    let rounds = (m - 1) * inverse as usize;
    let mut jobs = Vec::with_capacity(m + rounds * m);
    for i in 0..m {
        let mut coords = vec![0.0; d];
        coords[i] = 1.0;
        coords[m] = 1.0;
        jobs.push(VectorItem::from_raw(coords));
    }
    for _ in 0..rounds {
        for i in 0..m {
            let mut coords = vec![0.0; d];
            coords[i] = gamma;
            jobs.push(VectorItem::from_raw(coords));
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::makespan::exact_makespan;
    use crate::vsched::ContainerState;

    #[test]
    fn shape_of_the_stream() {
        let jobs = tight_example(2, 0.25).unwrap();
        assert_eq!(jobs.len(), 10);
        for v in &jobs {
            assert_eq!(v.dim(), 3);
            assert!(v.coords().iter().all(|&c| c == 0.0 || c == 0.25 || c == 1.0));
        }
        assert_eq!(tight_example(3, 0.2).unwrap().len(), 3 + 3 * 10);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(tight_example(1, 0.25).is_err());
        assert!(tight_example(2, 0.3).is_err());
        assert!(tight_example(2, 0.0).is_err());
    }

    #[test]
    fn two_machine_summary() {
        let jobs = tight_example(2, 0.25).unwrap();
        let mut st = ContainerState::with_gamma(2, 3, 1.0, 0.25).unwrap();
        for v in &jobs {
            st.process_job(v).unwrap();
        }
        let s = st.summarize();
        assert_eq!(s.big_count, 2);
        // The final T is 1, so a container closes only above norm γ: rounds of
        // two jobs alternate between a closing (2,1)γ / (1,2)γ container and an
        // open (1,1)γ one, which is still open when the stream ends.
        let mut containers: Vec<Vec<f64>> = s.jobs[2..].iter().map(|c| c.coords().to_vec()).collect();
        containers.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_eq!(
            containers,
            vec![vec![0.5, 0.25, 0.0], vec![0.25, 0.5, 0.0], vec![0.25, 0.25, 0.0]]
        );
        let opt_stream = exact_makespan(&jobs, 2, 16).unwrap().makespan;
        let opt_summary = exact_makespan(&s.jobs, 2, 16).unwrap().makespan;
        assert!((opt_stream - 1.0).abs() < 1e-9);
        assert!((opt_summary - 1.5).abs() < 1e-9);
    }
}
