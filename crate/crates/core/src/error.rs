use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input value violated the operation's domain (non-finite, out of range, ...).
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("summary is empty")]
    EmptySummary,

    /// A parameter (epsilon, delta, machine count, ...) is outside the supported range.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("item of size {size} does not fit into a unit bin")]
    InfeasibleItem { size: f64 },

    /// Column generation or the pricing search stopped before proving optimality.
    #[error("solver limit reached after {iterations} iterations (best incumbent: {best_bins} bins)")]
    SolverLimit { iterations: usize, best_bins: u64 },

    /// An exact oracle was asked to solve an instance above its size limit.
    #[error("instance has {items} items, above the exact oracle limit of {limit}")]
    OracleScale { items: usize, limit: usize },

    #[error("container placement failed after {attempts} seeds (best excess over bound: {best_excess})")]
    PlacementFailure { attempts: usize, best_excess: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub(crate) fn check_finite(value: f64, what: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::RejectedInput(format!("{what} must be finite, got {value}")))
    }
}
