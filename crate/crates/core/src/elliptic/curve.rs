use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{EllipticError, Result};

/// Base field of a curve: exact rationals or complex floats.
pub trait CurveField:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Equality test: exact over `Q`, relative tolerance over `C`.
    fn same(&self, other: &Self) -> bool;
    fn is_zero_like(&self) -> bool {
        self.same(&Self::zero())
    }
}

impl CurveField for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }
}

/// Relative tolerance used by the complex group law and membership test.
pub(crate) const COMPLEX_TOL: f64 = 1e-10;

impl CurveField for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn same(&self, other: &Self) -> bool {
        (self - other).norm() <= COMPLEX_TOL * (1.0 + self.norm() + other.norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurvePoint<K> {
    Infinity,
    Affine { x: K, y: K },
}

impl<K> CurvePoint<K> {
    pub fn affine(x: K, y: K) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&K> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&K> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { y, .. } => Some(y),
        }
    }
}

impl CurvePoint<BigRational> {
    pub fn to_complex(&self) -> CurvePoint<Complex64> {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: rat_to_c64(x),
                y: rat_to_c64(y),
            },
        }
    }
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn rat_to_c64(q: &BigRational) -> Complex64 {
    Complex64::new(rat_to_f64(q), 0.0)
}

/// `y^2 = x^3 + a2 x^2 + a4 x + a6`. Short Weierstrass form has `a2 = 0`;
/// the Legendre curve `y^2 = x(x-1)(x-lambda)` has `a2 = -(1+lambda)`,
/// `a4 = lambda`, `a6 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassCurve<K> {
    pub a2: K,
    pub a4: K,
    pub a6: K,
}

impl<K: CurveField> WeierstrassCurve<K> {
    pub fn new(a2: K, a4: K, a6: K) -> Result<Self> {
        let c = WeierstrassCurve { a2, a4, a6 };
        if c.discriminant().is_zero_like() {
            return Err(EllipticError::Singular);
        }
        Ok(c)
    }

    /// `y^2 = x^3 + A x + B`.
    pub fn short(a: K, b: K) -> Result<Self> {
        Self::new(K::zero(), a, b)
    }

    /// `y^2 = x (x - 1) (x - lambda)`.
    pub fn legendre(lambda: K) -> Result<Self> {
        let one = K::from_i64(1);
        Self::new(-(one + lambda.clone()), lambda, K::zero())
    }

    pub fn discriminant(&self) -> K {
        let (a2, a4, a6) = (&self.a2, &self.a4, &self.a6);
        let k = K::from_i64;
        let b2 = k(4) * a2.clone();
        let b4 = k(2) * a4.clone();
        let b6 = k(4) * a6.clone();
        let b8 = k(4) * a2.clone() * a6.clone() - a4.clone() * a4.clone();
        -(b2.clone() * b2.clone() * b8) - k(8) * b4.clone() * b4.clone() * b4.clone() - k(27) * b6.clone() * b6.clone()
            + k(9) * b2 * b4 * b6
    }

    /// Right-hand side `x^3 + a2 x^2 + a4 x + a6`.
    pub fn rhs(&self, x: &K) -> K {
        ((x.clone() + self.a2.clone()) * x.clone() + self.a4.clone()) * x.clone() + self.a6.clone()
    }

    pub fn contains(&self, p: &CurvePoint<K>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => (y.clone() * y.clone()).same(&self.rhs(x)),
        }
    }

    /// The point with the given coordinates, rejecting points off the curve.
    pub fn point(&self, x: K, y: K) -> Result<CurvePoint<K>> {
        let p = CurvePoint::Affine { x, y };
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(EllipticError::NotOnCurve)
        }
    }

    pub fn neg(&self, p: &CurvePoint<K>) -> CurvePoint<K> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: -y.clone(),
            },
        }
    }

    pub fn add(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> CurvePoint<K> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let m = if x1.same(x2) {
            if y1.same(&-y2.clone()) {
                return CurvePoint::Infinity;
            }
            let k = K::from_i64;
            (k(3) * x1.clone() * x1.clone() + k(2) * self.a2.clone() * x1.clone() + self.a4.clone())
                / (k(2) * y1.clone())
        } else {
            (y2.clone() - y1.clone()) / (x2.clone() - x1.clone())
        };
        let x3 = m.clone() * m.clone() - self.a2.clone() - x1.clone() - x2.clone();
        let y3 = m * (x1.clone() - x3.clone()) - y1.clone();
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn sub(&self, p: &CurvePoint<K>, q: &CurvePoint<K>) -> CurvePoint<K> {
        self.add(p, &self.neg(q))
    }

    pub fn dbl(&self, p: &CurvePoint<K>) -> CurvePoint<K> {
        self.add(p, p)
    }

    /// `[n] P` by double-and-add; negative `n` negates.
    pub fn mul(&self, n: i64, p: &CurvePoint<K>) -> CurvePoint<K> {
        let mut acc = CurvePoint::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.dbl(&base);
            k >>= 1;
        }
        acc
    }

    /// `(P_0, ..., P_M) -> (P_1 - P_0, ..., P_M - P_0)`.
    pub fn faltings_zhang(&self, points: &[CurvePoint<K>]) -> Vec<CurvePoint<K>> {
        match points.split_first() {
            None => Vec::new(),
            Some((p0, rest)) => {
                let minus = self.neg(p0);
                rest.iter().map(|p| self.add(p, &minus)).collect()
            }
        }
    }
}

impl WeierstrassCurve<BigRational> {
    pub fn to_complex(&self) -> WeierstrassCurve<Complex64> {
        WeierstrassCurve {
            a2: rat_to_c64(&self.a2),
            a4: rat_to_c64(&self.a4),
            a6: rat_to_c64(&self.a6),
        }
    }

    /// Short-form curve from integer coefficients.
    pub fn short_int(a: i64, b: i64) -> Result<Self> {
        Self::short(BigRational::from_i64(a), BigRational::from_i64(b))
    }

    pub fn is_integral(&self) -> bool {
        [&self.a2, &self.a4, &self.a6].iter().all(|c| c.denom().is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n)
    }

    fn qq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn discriminant_short_form() {
        let e = WeierstrassCurve::short_int(-1, 0).unwrap();
        // -16 (4 A^3 + 27 B^2) = 64
        assert_eq!(e.discriminant(), q(64));
        assert!(WeierstrassCurve::short_int(0, 0).is_err());
        assert!(WeierstrassCurve::short_int(-3, 2).is_err());
        assert!(WeierstrassCurve::legendre(q(1)).is_err());
        assert!(WeierstrassCurve::legendre(q(0)).is_err());
        assert!(WeierstrassCurve::legendre(qq(1, 2)).is_ok());
    }

    #[test]
    fn negation_pair_sums_to_infinity() {
        let e = WeierstrassCurve::short_int(0, -2).unwrap();
        let p = e.point(q(3), q(5)).unwrap();
        let mp = e.point(q(3), q(-5)).unwrap();
        assert!(e.add(&p, &mp).is_infinity());
        assert_eq!(e.add(&p, &CurvePoint::Infinity), p);
        assert_eq!(e.add(&CurvePoint::Infinity, &p), p);
    }

    #[test]
    fn doubling_known_point() {
        // 2 (3, 5) on y^2 = x^3 - 2 is (129/100, -383/1000).
        let e = WeierstrassCurve::short_int(0, -2).unwrap();
        let p = e.point(q(3), q(5)).unwrap();
        let d = e.dbl(&p);
        assert_eq!(d, CurvePoint::affine(qq(129, 100), qq(-383, 1000)));
        assert!(e.contains(&d));
        assert_eq!(e.mul(2, &p), d);
        assert_eq!(e.mul(-1, &p), e.neg(&p));
        assert!(e.mul(0, &p).is_infinity());
    }

    #[test]
    fn two_torsion_doubles_to_infinity() {
        let e = WeierstrassCurve::short_int(-1, 0).unwrap();
        let t = e.point(q(0), q(0)).unwrap();
        assert!(e.dbl(&t).is_infinity());
        let lg = WeierstrassCurve::legendre(qq(1, 3)).unwrap();
        for x in [q(0), q(1), qq(1, 3)] {
            let p = lg.point(x, q(0)).unwrap();
            assert!(lg.dbl(&p).is_infinity());
        }
    }

    #[test]
    fn faltings_zhang_examples() {
        let e = WeierstrassCurve::short_int(0, -2).unwrap();
        let p = e.point(q(3), q(5)).unwrap();
        let out = e.faltings_zhang(&[p.clone(), p.clone(), p.clone()]);
        assert!(out.iter().all(|x| x.is_infinity()));
        let t = e.dbl(&p);
        let out = e.faltings_zhang(&[p.clone(), e.add(&p, &t)]);
        assert_eq!(out, vec![t]);
        assert!(e.faltings_zhang(&[]).is_empty());
    }

    #[test]
    fn complex_group_law_tolerant() {
        let e = WeierstrassCurve::<Complex64>::legendre(Complex64::new(0.3, 0.2)).unwrap();
        let t = CurvePoint::affine(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(e.contains(&t));
        assert!(e.dbl(&t).is_infinity());
    }
}
