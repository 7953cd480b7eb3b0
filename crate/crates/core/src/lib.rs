// Guards such as `!(x > 0.0)` are written negated on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod elliptic;
pub mod heights;
pub mod intersection;
pub mod siegel;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
