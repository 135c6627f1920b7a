//! Container-based summaries for vector scheduling.
//!
//! A job is big when its largest coordinate exceeds `γ·T`, where
//! `T = max_k L_k / m` is the current average load of the most loaded
//! dimension. Big jobs are kept whole; small jobs are added to a single open
//! container which closes once its norm exceeds `γ·T`. When `T` grows, big
//! jobs and closed containers that fell below the threshold are merged back
//! into open containers. Every container stays within `2γ·T`.

mod container;
mod placement;
mod tight;

pub use container::{ContainerState, VsSummary};
pub use placement::{place_containers, Placement, DEFAULT_PLACEMENT_ATTEMPTS};
pub use tight::tight_example;

use crate::error::{Error, Result};

/// `γ = min(ε/4, ε²/(12·ln(d²/ε)))`, or `ε/4` when the logarithm is not
/// positive.
pub fn gamma_of(epsilon: f64, d: usize) -> f64 {
    let cap = epsilon / 4.0;
    let log = ((d * d) as f64 / epsilon).ln();
    if log <= 0.0 {
        cap
    } else {
        cap.min(epsilon * epsilon / (12.0 * log))
    }
}

pub(crate) fn check_vsched_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")))
    }
}

/// Upper end of the summary sandwich: `2 − 1/m + 3ε`.
pub fn sandwich_factor(m: usize, epsilon: f64) -> f64 {
    2.0 - 1.0 / m as f64 + 3.0 * epsilon
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_of(1.0, 1), 0.25);
        let expected = 0.25 / (12.0 * 32f64.ln());
        assert!((gamma_of(0.5, 4) - expected).abs() < 1e-15);
        assert!((gamma_of(0.5, 4) - 0.0060112).abs() < 1e-7);
    }

    #[test]
    fn gamma_is_non_increasing_in_d() {
        for eps in [0.1, 0.3, 0.5, 1.0] {
            for d in 1..20 {
                assert!(gamma_of(eps, d + 1) <= gamma_of(eps, d));
            }
        }
    }
}
