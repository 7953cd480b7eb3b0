use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::curve::{CurvePoint, WeierstrassCurve};
use super::periods::Lattice;
use super::{EllipticError, Result};
use crate::siegel::{betti_coordinates, BettiCoords, PolarizationType, SiegelPoint};

const POLE_RADIUS: f64 = 1e-8;
const SERIES_EPS: f64 = 1e-17;

/// `wp` and `wp'` of a lattice through `q`-series, after moving `tau` into the
/// standard fundamental domain with `T` and `S`.
#[derive(Debug, Clone)]
pub struct WeierstrassP {
    w1: C64,
    tau: C64,
    q: C64,
    terms: usize,
}

impl WeierstrassP {
    pub fn new(lattice: &Lattice) -> Self {
        let (mut w1, mut w2) = (lattice.w1(), lattice.w2());
        for _ in 0..200 {
            let tau = w2 / w1;
            let n = tau.re.round();
            w2 -= w1 * n;
            let tau = w2 / w1;
            if tau.norm() < 1.0 - 1e-15 {
                // tau -> -1/tau, basis (w2, -w1) keeps the orientation.
                let old = w1;
                w1 = w2;
                w2 = -old;
            } else {
                break;
            }
        }
        let tau = w2 / w1;
        let q = (C64::new(0.0, 2.0 * PI) * tau).exp();
        let qn = q.norm();
        let terms = if qn == 0.0 {
            1
        } else {
            ((SERIES_EPS.ln() / qn.ln()).ceil() as usize + 2).max(2)
        };
        WeierstrassP { w1, tau, q, terms }
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    /// `(wp(z), wp'(z))`, or `None` when `z` is within `1e-8` of a lattice point.
    pub fn eval(&self, z: C64) -> Option<(C64, C64)> {
        let mut v = z / self.w1;
        let beta = (v.im / self.tau.im).round();
        v -= self.tau * beta;
        v -= C64::new(v.re.round(), 0.0);
        if (v * self.w1).norm() < POLE_RADIUS {
            return None;
        }
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let x = two_pi_i * v;
        let u = x.exp();
        let s = (x * 0.5).sinh();
        let c = (x * 0.5).cosh();
        let mut p = C64::new(1.0 / 12.0, 0.0) + (s * s * 4.0).inv();
        let mut dp = -c / (s * s * s * 4.0);
        let mut qn = C64::new(1.0, 0.0);
        let one = C64::new(1.0, 0.0);
        for _ in 0..self.terms {
            qn *= self.q;
            let xn = qn * u;
            let yn = qn / u;
            let a = one - xn;
            let b = one - yn;
            let e = one - qn;
            p += xn / (a * a) + yn / (b * b) - qn * 2.0 / (e * e);
            dp += xn * (one + xn) / (a * a * a) - yn * (one + yn) / (b * b * b);
        }
        let f = two_pi_i / self.w1;
        Some((p * f * f, dp * f * f * f))
    }
}

/// The point `(4 wp(z) - a2/3, 4 wp'(z))` of the curve whose period lattice
/// of `dx/y` is `lattice`; lattice points map to infinity.
pub fn elliptic_exp(curve: &WeierstrassCurve<C64>, lattice: &Lattice, z: C64) -> CurvePoint<C64> {
    elliptic_exp_checked(curve, lattice, z).unwrap_or(CurvePoint::Infinity)
}

/// As [`elliptic_exp`] but reporting `NearPole` instead of returning infinity.
pub fn elliptic_exp_checked(curve: &WeierstrassCurve<C64>, lattice: &Lattice, z: C64) -> Result<CurvePoint<C64>> {
    let wp = WeierstrassP::new(lattice);
    exp_with(curve, &wp, z)
}

fn exp_with(curve: &WeierstrassCurve<C64>, wp: &WeierstrassP, z: C64) -> Result<CurvePoint<C64>> {
    let (p, dp) = wp.eval(z).ok_or(EllipticError::NearPole)?;
    Ok(CurvePoint::Affine {
        x: p * 4.0 - curve.a2 / 3.0,
        y: dp * 4.0,
    })
}

/// `z` in the fundamental parallelogram with `elliptic_exp(z) = P`.
pub fn elliptic_log(curve: &WeierstrassCurve<C64>, point: &CurvePoint<C64>, lattice: &Lattice) -> Result<C64> {
    let (x, y) = match point {
        CurvePoint::Infinity => return Err(EllipticError::AtInfinity),
        CurvePoint::Affine { x, y } => (*x, *y),
    };
    if !curve.contains(point) {
        return Err(EllipticError::NotOnCurve);
    }
    let wp = WeierstrassP::new(lattice);
    let p0 = (x + curve.a2 / 3.0) / 4.0;
    let dp0 = y / 4.0;
    let scale = 1.0 + p0.norm();

    if dp0.norm() <= 1e-12 * scale.powf(1.5) {
        let halves = [
            lattice.w1() * 0.5,
            lattice.w2() * 0.5,
            (lattice.w1() + lattice.w2()) * 0.5,
        ];
        let best = halves
            .iter()
            .copied()
            .filter_map(|h| wp.eval(h).map(|(p, _)| (h, (p - p0).norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(EllipticError::NoConvergence("elliptic logarithm"))?;
        if best.1 > 1e-7 * scale {
            return Err(EllipticError::NoConvergence("elliptic logarithm"));
        }
        return Ok(lattice.reduce(best.0));
    }

    let mut seeds: Vec<(f64, C64)> = Vec::new();
    const GRID: usize = 24;
    for i in 0..GRID {
        for j in 0..GRID {
            let z = lattice.from_coords((i as f64 + 0.5) / GRID as f64, (j as f64 + 0.5) / GRID as f64);
            if let Some((p, _)) = wp.eval(z) {
                seeds.push(((p - p0).norm() / scale, z));
            }
        }
    }
    let r = p0.sqrt().inv();
    seeds.push((0.0, r));
    seeds.push((0.0, -r));
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));

    for &(_, seed) in seeds.iter().take(8) {
        if let Some(z) = newton(&wp, seed, p0) {
            let (p, dp) = match wp.eval(z) {
                Some(v) => v,
                None => continue,
            };
            if (p - p0).norm() > 1e-11 * scale {
                continue;
            }
            let tol = 1e-6 * (1.0 + dp0.norm());
            let z = if (dp - dp0).norm() <= tol {
                z
            } else if (dp + dp0).norm() <= tol {
                -z
            } else {
                continue;
            };
            return Ok(lattice.reduce(z));
        }
    }
    Err(EllipticError::NoConvergence("elliptic logarithm"))
}

fn newton(wp: &WeierstrassP, mut z: C64, p0: C64) -> Option<C64> {
    let scale = 1.0 + p0.norm();
    for _ in 0..60 {
        let (p, dp) = wp.eval(z)?;
        let r = p - p0;
        if r.norm() <= 1e-14 * scale {
            return Some(z);
        }
        if dp.norm() == 0.0 {
            return None;
        }
        let mut step = r / dp;
        // Damp wild steps; the seed is already in the right cell.
        let lim = 0.25 * wp.w1.norm();
        if step.norm() > lim {
            step *= lim / step.norm();
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let (p, _) = wp.eval(z)?;
    ((p - p0).norm() <= 1e-11 * scale).then_some(z)
}

/// Betti coordinates of `P` for `Z = [tau]`, `w = log(P) / w1`, `D = (1)`.
pub fn betti_of_point(
    curve: &WeierstrassCurve<C64>,
    point: &CurvePoint<C64>,
    lattice: &Lattice,
) -> Result<BettiCoords> {
    if point.is_infinity() {
        return Ok(BettiCoords::zero(1));
    }
    let z = elliptic_log(curve, point, lattice)?;
    let zz = SiegelPoint::scalar(lattice.tau())?;
    let w = DVector::from_element(1, z / lattice.w1());
    Ok(betti_coordinates(&zz, &w, &PolarizationType::principal(1))?)
}
