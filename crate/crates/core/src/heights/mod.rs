//! Weil heights over `Q`, canonical heights through the Tate limit of the
//! duplication map, Silverman-Tate ratio scans on the Legendre family, and
//! the arithmetic that assembles the height-inequality constants.

mod constants;
mod forms;
mod scan;
mod tate;
mod weil;

pub use constants::{assemble_constants, assemble_constants_map, AssembledConstants};
pub use forms::{x_duplication, DuplicationForms};
pub use scan::{legendre_scan_grid, silverman_tate_scan, ScanReport, ScanSample, ScanSkip};
pub use tate::{
    duplication_defect, neron_tate_pairing, tate_limit_height, HeightEngine, HeightReport, StopRule, TateOptions,
};
pub use weil::{big_ln, naive_total_height, rational_height, weil_height, RationalProjectivePoint};

use crate::elliptic::EllipticError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeightError {
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("2P is the point at infinity (2-torsion)")]
    TwoTorsion,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("iterate at level {level} has {digits} digits, over the budget of {budget}")]
    BudgetExceeded { level: usize, digits: u64, budget: u64 },
    #[error("no convergence to the requested tolerance within {levels} doubling steps")]
    NoConvergence { levels: usize },
    #[error("extra iterations moved the value by {moved:e}, more than the estimate {estimate:e}")]
    ParanoiaFailed { moved: f64, estimate: f64 },
    #[error("c2 is not given at N = {0}")]
    MissingC2(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

pub type Result<T> = std::result::Result<T, HeightError>;
