//! Counting rational points the Vojta way: Mordell-Weil lattice geometry and
//! ball-packing covers for small points, the `c^rho` bound for large points,
//! a finite check of the Alon-type non-containment lemma, the Hurwitz packet
//! bound, and a scan of the small-difference alternative on a fiber.

mod alon;
mod dichotomy;
mod lattice;
mod points;

pub use alon::{
    alon_bound, alon_grid, alon_test, grid_systems, AlonCounterexample, AlonGridReport, GridCurve, MultiPoly,
    DEFAULT_TUPLE_BUDGET,
};
pub use dichotomy::{dichotomy_scan, DichotomyReport, DichotomyVerdict};
pub use lattice::{covering_bound, greedy_cover, nt_distance, nt_norm, MWLattice};
pub use points::{hurwitz_packet_bound, split_small_large, vojta_large_bound, Partition, PointBudget};

use crate::heights::HeightError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountingError {
    #[error("expected a vector of length {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("Gram matrix is not symmetric positive semi-definite: {0}")]
    NotPsd(String),
    #[error("{tuples} tuples exceed the budget of {budget}")]
    BudgetExceeded { tuples: u128, budget: u64 },
    #[error("genus {0} is below 2")]
    GenusTooSmall(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Height(#[from] HeightError),
}

pub type Result<T> = std::result::Result<T, CountingError>;
