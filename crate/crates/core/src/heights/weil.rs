use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{HeightError, Result};

/// Natural log of `|n|` without overflow for huge integers.
pub fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A point of `P^n(Q)` stored as coprime integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalProjectivePoint {
    coords: Vec<BigInt>,
}

impl RationalProjectivePoint {
    /// Divides out the gcd; the first nonzero coordinate is made positive.
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        let g = coords.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return Err(HeightError::ZeroPoint);
        }
        let mut coords: Vec<BigInt> = coords.into_iter().map(|c| c / &g).collect();
        if coords.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            coords.iter_mut().for_each(|c| *c = -c.clone());
        }
        Ok(RationalProjectivePoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clears denominators of a rational affine or projective tuple.
    pub fn from_rationals(coords: &[BigRational]) -> Result<Self> {
        let l = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        Self::new(
            coords
                .iter()
                .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect(),
        )
    }

    /// `[x : 1]` for a rational `x`.
    pub fn from_affine_x(x: &BigRational) -> Self {
        RationalProjectivePoint::new(vec![x.numer().clone(), x.denom().clone()]).expect("denominator is nonzero")
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }
}

impl fmt::Display for RationalProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// `log max_i |x_i|` over the coprime representative.
pub fn weil_height(p: &RationalProjectivePoint) -> f64 {
    let m = p.coords.iter().map(|c| c.abs()).max().unwrap_or_default();
    big_ln(&m).max(0.0)
}

/// Height of `[num : den]` for a rational number.
pub fn rational_height(x: &BigRational) -> f64 {
    big_ln(&x.numer().abs().max(x.denom().clone())).max(0.0)
}

/// `h(P) = h(P') + h(pi(P))`.
pub fn naive_total_height(fiber: &RationalProjectivePoint, base: &RationalProjectivePoint) -> f64 {
    weil_height(fiber) + weil_height(base)
}
