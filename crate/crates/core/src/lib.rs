//! One-pass summaries for massive bin packing and scheduling inputs.
//!
//! A stream of item sizes (or job vectors) is compressed into a tiny
//! high-multiplicity instance while it is read. After the stream ends, the
//! summary is solved offline and turned into an estimate of the optimal number
//! of bins (or the optimal makespan) with a provable approximation sandwich.
//!
//! The building blocks:
//!
//! * [`quantiles`]: a deterministic Greenwald–Khanna quantile summary ordered
//!   non-increasingly, with extraction of stored values and rank upper bounds.
//! * [`bp_round`]: rounding of the big-item substream into a
//!   [`RoundedInstance`](bp_round::RoundedInstance), either with one summary
//!   or with one summary per geometric size group.
//! * [`hmbp`]: solvers for the rounded high-multiplicity instance: first fit
//!   decreasing, the Gilmore–Gomory column generation heuristic, the cutting
//!   stock LP bound and an exact branch-and-bound oracle.
//! * [`bp_estimate`]: the full streaming bin count estimator and the
//!   rank-estimation reduction.
//! * [`vbp`]: vector bin packing through the ℓ∞ reduction and the
//!   largest-coordinate split.
//! * [`vsched`]: container-based summaries for vector scheduling, the
//!   randomized container placement and the tight example.
//! * [`sched_round`]: rounding summaries for scalar makespan scheduling and
//!   for vector scheduling in small dimension.
//! * [`makespan`]: greedy, LPT and exact makespan oracles shared by the
//!   scheduling modules.
//! * [`streams`]: stream parsing, seeded generators and memory accounting.

pub mod bp_estimate;
pub mod bp_round;
pub mod error;
pub mod hmbp;
pub mod makespan;
pub mod quantiles;
pub mod sched_round;
pub mod streams;
pub mod vbp;
pub mod vector;
pub mod vsched;

mod numeric;

pub use error::{Error, Result};
pub use vector::VectorItem;

/// Tolerance used for every capacity comparison against a unit bin.
pub const CAPACITY_TOL: f64 = 1e-9;
