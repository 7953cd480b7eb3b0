//! The duplication map on `x`-coordinates as a pair of integral binary
//! quartics, with the constants bounding how far `h(x(2P)) - 4 h(x(P))` can
//! stray from zero.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::weil::big_ln;
use super::{HeightError, Result};
use crate::elliptic::WeierstrassCurve;

/// `x(2P) = (x^4 - 2 a4 x^2 - 8 a6 x + a4^2 - 4 a2 a6) / (4 (x^3 + a2 x^2 + a4 x + a6))`.
pub fn x_duplication(curve: &WeierstrassCurve<BigRational>, x: &BigRational) -> Result<BigRational> {
    let den = curve.rhs(x) * BigRational::from_integer(4.into());
    if den.is_zero() {
        return Err(HeightError::TwoTorsion);
    }
    let two = BigRational::from_integer(2.into());
    let eight = BigRational::from_integer(8.into());
    let four = BigRational::from_integer(4.into());
    let x2 = x * x;
    let num = &x2 * &x2 - &two * &curve.a4 * &x2 - &eight * &curve.a6 * x + &curve.a4 * &curve.a4
        - &four * &curve.a2 * &curve.a6;
    Ok(num / den)
}

/// Integral forms `F, G` of degree 4 with `x(2P) = F(n, d) / G(n, d)` for
/// `x(P) = n/d`, the resultant `R = Res(F, G)`, and the constants `S`, `T`
/// with `|R| / S <= max(|F|, |G|) <= T` on `max(|n|, |d|) = 1`.
#[derive(Debug, Clone)]
pub struct DuplicationForms {
    /// Coefficients of `n^4, n^3 d, ..., d^4`.
    pub f: [BigInt; 5],
    pub g: [BigInt; 5],
    pub resultant: BigInt,
    /// `ln T`.
    pub ln_upper: f64,
    /// `ln S`.
    pub ln_lower: f64,
}

impl DuplicationForms {
    pub fn new(curve: &WeierstrassCurve<BigRational>) -> Result<Self> {
        let q = |n: i64| BigRational::from_integer(n.into());
        let (a2, a4, a6) = (&curve.a2, &curve.a4, &curve.a6);
        let fr = [q(1), q(0), -q(2) * a4, -q(8) * a6, a4 * a4 - q(4) * a2 * a6];
        let gr = [q(0), q(4), q(4) * a2, q(4) * a4, q(4) * a6];
        let l = fr
            .iter()
            .chain(gr.iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let lr = BigRational::from_integer(l);
        let scale = |c: &BigRational| (c * &lr).to_integer();
        let f: [BigInt; 5] = std::array::from_fn(|i| scale(&fr[i]));
        let g: [BigInt; 5] = std::array::from_fn(|i| scale(&gr[i]));

        let syl = sylvester(&f, &g);
        let resultant = det_bareiss(syl.clone());
        if resultant.is_zero() {
            return Err(HeightError::Elliptic(crate::elliptic::EllipticError::Singular));
        }
        // f1 F + g1 G = R n^7 and f2 F + g2 G = R d^7 have integral solutions
        // because det(Sylvester) = +-R.
        let mut s_max = 0.0f64;
        for target in [0usize, 7] {
            let mut rhs = vec![BigRational::zero(); 8];
            rhs[target] = BigRational::from_integer(resultant.clone());
            let sol = solve_transposed(&syl, rhs);
            let l1: f64 = sol.iter().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).sum();
            s_max = s_max.max(l1);
        }
        let l1 = |c: &[BigInt; 5]| c.iter().map(|x| x.abs().to_f64().unwrap_or(f64::INFINITY)).sum::<f64>();
        let t = l1(&f).max(l1(&g));
        Ok(DuplicationForms {
            f,
            g,
            resultant,
            ln_upper: t.ln(),
            ln_lower: s_max.ln(),
        })
    }

    /// Bound on `|h(x(2P)) - 4 h(x(P))|` for every rational point with `2P != O`.
    pub fn defect_bound(&self) -> f64 {
        self.ln_upper.abs().max(self.ln_lower.abs())
    }

    pub fn ln_abs_resultant(&self) -> f64 {
        big_ln(&self.resultant)
    }

    pub fn eval_exact(&self, n: &BigInt, d: &BigInt) -> (BigInt, BigInt) {
        (eval_form(&self.f, n, d), eval_form(&self.g, n, d))
    }

    pub fn eval_float(&self, u: f64, v: f64) -> (f64, f64) {
        let ev = |c: &[BigInt; 5]| {
            let mut acc = 0.0;
            for (i, ci) in c.iter().enumerate() {
                acc += ci.to_f64().unwrap_or(f64::INFINITY) * u.powi(4 - i as i32) * v.powi(i as i32);
            }
            acc
        };
        (ev(&self.f), ev(&self.g))
    }
}

fn eval_form(c: &[BigInt; 5], n: &BigInt, d: &BigInt) -> BigInt {
    let mut np = vec![BigInt::one(); 5];
    let mut dp = vec![BigInt::one(); 5];
    for k in 1..5 {
        np[k] = &np[k - 1] * n;
        dp[k] = &dp[k - 1] * d;
    }
    let mut acc = BigInt::zero();
    for (i, ci) in c.iter().enumerate() {
        if !ci.is_zero() {
            acc += ci * &np[4 - i] * &dp[i];
        }
    }
    acc
}

/// Rows: shifts of `f` then shifts of `g`, columns indexed by the monomials
/// `n^7, n^6 d, ..., d^7`.
#[allow(clippy::manual_memcpy)]
fn sylvester(f: &[BigInt; 5], g: &[BigInt; 5]) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); 8]; 8];
    for s in 0..4 {
        for i in 0..5 {
            m[s][s + i] = f[i].clone();
            m[4 + s][s + i] = g[i].clone();
        }
    }
    m
}

/// Fraction-free Gaussian elimination.
pub(crate) fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Solves `x^T M = rhs^T`, i.e. the coefficient vector `x` of the
/// combination of Sylvester rows equal to `rhs`.
#[allow(clippy::needless_range_loop)]
fn solve_transposed(m: &[Vec<BigInt>], rhs: Vec<BigRational>) -> Vec<BigRational> {
    let n = m.len();
    // Augmented matrix of M^T.
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..n).map(|j| BigRational::from_integer(m[j][i].clone())).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nonsingular Sylvester matrix");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in col..=n {
                    let v = &a[col][j] * &factor;
                    a[r][j] -= v;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n].clone()).collect()
}
