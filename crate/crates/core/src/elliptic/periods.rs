use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::curve::WeierstrassCurve;
use super::{EllipticError, Result};

const AGM_MAX_ITER: usize = 64;

/// A period lattice `Z w1 + Z w2` with `Im(w2 / w1) > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    w1: C64,
    w2: C64,
}

impl Lattice {
    /// Orients the basis so that `Im(w2/w1) > 0`, negating `w2` if needed.
    pub fn new(w1: C64, w2: C64) -> Result<Self> {
        if !(w1.norm() > 0.0) || !w1.is_finite() || !w2.is_finite() {
            return Err(EllipticError::DegenerateLattice);
        }
        let tau = w2 / w1;
        if tau.im.abs() <= 1e-14 * tau.norm().max(1.0) {
            return Err(EllipticError::DegenerateLattice);
        }
        let w2 = if tau.im < 0.0 { -w2 } else { w2 };
        Ok(Lattice { w1, w2 })
    }

    pub fn w1(&self) -> C64 {
        self.w1
    }

    pub fn w2(&self) -> C64 {
        self.w2
    }

    pub fn tau(&self) -> C64 {
        self.w2 / self.w1
    }

    /// Real coordinates `(alpha, beta)` with `z = alpha w1 + beta w2`.
    pub fn coords(&self, z: C64) -> (f64, f64) {
        let t = z / self.w1;
        let tau = self.tau();
        let beta = t.im / tau.im;
        (t.re - beta * tau.re, beta)
    }

    pub fn from_coords(&self, alpha: f64, beta: f64) -> C64 {
        self.w1 * alpha + self.w2 * beta
    }

    /// Representative of `z` in the half-open parallelogram `[0,1) w1 + [0,1) w2`.
    pub fn reduce(&self, z: C64) -> C64 {
        let (a, b) = self.coords(z);
        self.from_coords(crate::siegel::frac(a), crate::siegel::frac(b))
    }

    /// Distance-like measure of `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: C64) -> f64 {
        let (a, b) = self.coords(z);
        let (ra, rb) = (a.round(), b.round());
        let mut best = f64::INFINITY;
        for da in -1..=1 {
            for db in -1..=1 {
                let p = self.from_coords(ra + da as f64, rb + db as f64);
                best = best.min((z - p).norm());
            }
        }
        best
    }
}

/// Arithmetic-geometric mean with the right choice of square root at every
/// step (`|a - b| <= |a + b|`), which yields the principal value.
pub fn agm(a: C64, b: C64) -> Result<C64> {
    let (mut a, mut b) = (a, b);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).norm() <= 1e-15 * a.norm() {
            return Ok((a + b) * 0.5);
        }
        let an = (a + b) * 0.5;
        let mut bn = (a * b).sqrt();
        if (an - bn).norm() > (an + bn).norm() {
            bn = -bn;
        }
        a = an;
        b = bn;
    }
    Err(EllipticError::NoConvergence("AGM"))
}

/// Complete elliptic integral of the first kind `K(m)`, parameter convention
/// `K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt`, analytic off `[1, inf)`.
pub fn complete_k(m: C64) -> Result<C64> {
    let s = (C64::new(1.0, 0.0) - m).sqrt();
    let g = agm(C64::new(1.0, 0.0), s)?;
    if g.norm() == 0.0 {
        return Err(EllipticError::NoConvergence("AGM (zero mean)"));
    }
    Ok(C64::new(PI / 2.0, 0.0) / g)
}

/// True when `lambda` avoids `{0, 1}` and the real cuts `(-inf, 0]`, `[1, inf)`.
pub fn in_legendre_domain(lambda: C64) -> bool {
    if !lambda.is_finite() {
        return false;
    }
    if lambda.im.abs() > 1e-14 {
        return true;
    }
    lambda.re > 0.0 && lambda.re < 1.0
}

/// Periods of `dx/y` on `y^2 = x(x-1)(x-lambda)`: `w1 = 4K(lambda)`,
/// `w2 = 4i K(1 - lambda)`.
pub fn periods_legendre(lambda: C64) -> Result<Lattice> {
    if !in_legendre_domain(lambda) {
        return Err(EllipticError::BranchCut(format!("{lambda}")));
    }
    let k = complete_k(lambda)?;
    let kp = complete_k(C64::new(1.0, 0.0) - lambda)?;
    Lattice::new(k * 4.0, C64::new(0.0, 4.0) * kp)
}

/// Period lattice of `dx/y` for an arbitrary complex curve, by moving the
/// roots of the cubic to `0, 1, lambda`.
pub fn periods(curve: &WeierstrassCurve<C64>) -> Result<Lattice> {
    let roots = cubic_roots(curve.a2, curve.a4, curve.a6)?;
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<(f64, C64, C64)> = None;
    for p in PERMS {
        let (e1, e2, e3) = (roots[p[0]], roots[p[1]], roots[p[2]]);
        let s = e2 - e1;
        let lambda = (e3 - e1) / s;
        if !in_legendre_domain(lambda) {
            continue;
        }
        let score = cut_distance(lambda);
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, lambda, s));
        }
    }
    let (_, lambda, s) = best.ok_or(EllipticError::Singular)?;
    // x = e1 + s X turns dx/y into s^{-1/2} dX/Y.
    let l = periods_legendre(lambda)?;
    let scale = s.sqrt().inv();
    Lattice::new(l.w1() * scale, l.w2() * scale)
}

fn cut_distance(lambda: C64) -> f64 {
    let to_left = if lambda.re <= 0.0 {
        lambda.im.abs()
    } else {
        lambda.norm()
    };
    let to_right = if lambda.re >= 1.0 {
        lambda.im.abs()
    } else {
        (lambda - 1.0).norm()
    };
    to_left.min(to_right)
}

/// Roots of `x^3 + a x^2 + b x + c` by Durand-Kerner with Newton polishing.
fn cubic_roots(a: C64, b: C64, c: C64) -> Result<[C64; 3]> {
    let f = |x: C64| ((x + a) * x + b) * x + c;
    let df = |x: C64| (x * 3.0 + a * 2.0) * x + b;
    let scale = 1.0 + a.norm().max(b.norm().sqrt()).max(c.norm().cbrt());
    let seed = C64::new(0.4, 0.9) * scale;
    let mut r = [C64::new(1.0, 0.0) * scale, seed, seed * seed / scale];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-16 * scale {
            break;
        }
    }
    for x in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*x);
            if d.norm() == 0.0 {
                break;
            }
            *x -= f(*x) / d;
        }
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(EllipticError::NoConvergence("cubic root finder"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agm_real_value() {
        // AGM(1, sqrt 2) = 1.19814023473559220744...
        let m = agm(C64::new(1.0, 0.0), C64::new(2f64.sqrt(), 0.0)).unwrap();
        assert!((m.re - 1.198_140_234_735_592_2).abs() < 1e-15);
    }

    #[test]
    fn half_gives_square_lattice() {
        let l = periods_legendre(C64::new(0.5, 0.0)).unwrap();
        let tau = l.tau();
        assert!(tau.re.abs() < 1e-12);
        assert!((tau.im - 1.0).abs() < 1e-12);
        // 4 K(1/2) = 7.41629870920548767...
        assert!((l.w1().re - 7.416_298_709_205_487_7).abs() < 1e-12);
    }

    #[test]
    fn branch_cut_rejected() {
        for l in [0.0, 1.0, -0.5, 1.5] {
            assert!(matches!(
                periods_legendre(C64::new(l, 0.0)),
                Err(EllipticError::BranchCut(_))
            ));
        }
        assert!(periods_legendre(C64::new(1.5, 0.1)).is_ok());
        assert!(periods_legendre(C64::new(-0.5, -0.3)).unwrap().tau().im > 0.0);
    }

    #[test]
    fn lattice_coordinates_round_trip() {
        let l = Lattice::new(C64::new(2.0, 0.3), C64::new(0.5, 1.7)).unwrap();
        let z = l.from_coords(0.3, -1.25);
        let (a, b) = l.coords(z);
        assert!((a - 0.3).abs() < 1e-14 && (b + 1.25).abs() < 1e-14);
        let r = l.reduce(z);
        let (ra, rb) = l.coords(r);
        assert!((ra - 0.3).abs() < 1e-14 && (rb - 0.75).abs() < 1e-14);
        assert!(l.distance_to_lattice(l.from_coords(3.0, -2.0)) < 1e-13);
    }

    #[test]
    fn orientation_is_enforced() {
        let l = Lattice::new(C64::new(1.0, 0.0), C64::new(0.0, -1.0)).unwrap();
        assert!(l.tau().im > 0.0);
        assert!(Lattice::new(C64::new(1.0, 0.0), C64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn general_curve_matches_legendre() {
        let lam = C64::new(0.3, 0.2);
        let lg = WeierstrassCurve::<C64>::legendre(lam).unwrap();
        let direct = periods_legendre(lam).unwrap();
        let general = periods(&lg).unwrap();
        // Same lattice: each basis vector of one is an integer combination of the other.
        for w in [general.w1(), general.w2()] {
            let (a, b) = direct.coords(w);
            assert!((a - a.round()).abs() < 1e-9 && (b - b.round()).abs() < 1e-9);
        }
        let covol = |l: &Lattice| (l.w1().conj() * l.w2()).im.abs();
        assert!((covol(&direct) - covol(&general)).abs() < 1e-9 * covol(&direct));
    }

    #[test]
    fn cubic_roots_found() {
        let r = cubic_roots(C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, e) in re.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((x - e).abs() < 1e-12);
        }
    }
}
