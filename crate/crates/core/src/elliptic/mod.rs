//! Elliptic curves as genus-one fibers: the chord-tangent group law over `Q`
//! and `C`, periods of `dx/y` via the AGM, the Weierstrass exponential and
//! its inverse, and the Legendre family with a few named sections.

mod curve;
mod legendre;
mod periods;
mod weierstrass;

pub use curve::{CurveField, CurvePoint, WeierstrassCurve};
pub use legendre::{legendre_section, legendre_section_rational, LegendreChart, LegendreSection};
pub use periods::{agm, complete_k, in_legendre_domain, periods, periods_legendre, Lattice};
pub use weierstrass::{betti_of_point, elliptic_exp, elliptic_exp_checked, elliptic_log, WeierstrassP};

use crate::siegel::SiegelError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("singular curve (zero discriminant)")]
    Singular,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("lambda = {0} lies on the excluded branch cut")]
    BranchCut(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("z is within 1e-8 of a lattice point")]
    NearPole,
    #[error("the point at infinity has no finite elliptic logarithm representative here")]
    AtInfinity,
    #[error("degenerate period lattice")]
    DegenerateLattice,
    #[error("unknown section {0:?}")]
    UnknownSection(String),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

pub type Result<T> = std::result::Result<T, EllipticError>;
