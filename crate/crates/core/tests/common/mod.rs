#![allow(dead_code)]

use bh_core::siegel::{SiegelPoint, TangentVector, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0))
}

/// `X + i Y` with `X` symmetric and `Y = A A^T + I / 2`, so `cond(Y)` stays small.
pub fn random_siegel(rng: &mut ChaCha8Rng, g: usize) -> SiegelPoint {
    let a = DMatrix::from_fn(g, g, |_, _| uniform(rng, -1.0, 1.0));
    let y = &a * a.transpose() + DMatrix::identity(g, g) * 0.5;
    let x0 = DMatrix::from_fn(g, g, |_, _| uniform(rng, -1.0, 1.0));
    let x = (&x0 + x0.transpose()) * 0.5;
    let z = DMatrix::from_fn(g, g, |i, j| C64::new(x[(i, j)], y[(i, j)]));
    SiegelPoint::new(z).expect("well-conditioned sample")
}

pub fn random_vector(rng: &mut ChaCha8Rng, g: usize) -> DVector<C64> {
    DVector::from_fn(g, |_, _| random_c(rng))
}

pub fn random_tangent(rng: &mut ChaCha8Rng, g: usize) -> TangentVector {
    let w = random_vector(rng, g);
    let z = DMatrix::from_fn(g, g, |_, _| random_c(rng));
    TangentVector::new(w, z).expect("matching sizes")
}
