use serde::Serialize;

use super::{CountingError, Result};

/// Small-point threshold `B` and the large-point base constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointBudget {
    pub small_threshold: f64,
    pub large_bound_base: f64,
}

impl PointBudget {
    pub fn new(small_threshold: f64, large_bound_base: f64) -> Result<Self> {
        if !(small_threshold >= 0.0) {
            return Err(CountingError::InvalidArgument(format!(
                "B must be nonnegative, got {small_threshold}"
            )));
        }
        if !(large_bound_base >= 1.0) {
            return Err(CountingError::InvalidArgument(format!(
                "c must be at least 1, got {large_bound_base}"
            )));
        }
        Ok(PointBudget {
            small_threshold,
            large_bound_base,
        })
    }

    /// `B = c0 * max(1, h)` for a curve whose modular height is `h`.
    pub fn from_base_height(c0: f64, h: f64, large_bound_base: f64) -> Result<Self> {
        Self::new(c0 * h.max(1.0), large_bound_base)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition<T> {
    pub small: Vec<T>,
    pub large: Vec<T>,
}

/// Points with height `<= B` are small, the rest large; input order is kept
/// on both sides.
pub fn split_small_large<T: Clone>(heights: &[(T, f64)], b: f64) -> Result<Partition<T>> {
    if !(b >= 0.0) {
        return Err(CountingError::InvalidArgument(format!(
            "B must be nonnegative, got {b}"
        )));
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    for (id, h) in heights {
        if *h <= b {
            small.push(id.clone());
        } else {
            large.push(id.clone());
        }
    }
    Ok(Partition { small, large })
}

/// `(c^rho, c^(1 + rho))`.
pub fn vojta_large_bound(c: f64, rho: u32) -> Result<(f64, f64)> {
    if !(c >= 1.0) {
        return Err(CountingError::InvalidArgument(format!("c must be at least 1, got {c}")));
    }
    Ok((c.powi(rho as i32), c.powi(rho as i32 + 1)))
}

/// `84 (g - 1)`.
pub fn hurwitz_packet_bound(g: u64) -> Result<u64> {
    if g < 2 {
        return Err(CountingError::GenusTooSmall(g));
    }
    (g - 1)
        .checked_mul(84)
        .ok_or_else(|| CountingError::InvalidArgument("84 (g - 1) overflows".into()))
}
