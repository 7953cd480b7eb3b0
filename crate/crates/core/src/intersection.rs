//! Intersection numbers on products of projective spaces, the degree
//! bookkeeping of iterated duplication graphs, and the bigness test
//! `(F^d) > d c1 N^2 (M . F^{d-1})`.
//!
//! Everything here is exact integer or rational arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectionError {
    #[error("classes live on different spaces")]
    SpaceMismatch,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("bad indexing: {0}")]
    BadIndexing(String),
    #[error("kappa and c must be positive")]
    NonPositive,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, IntersectionError>;

/// `P^{n_1} x ... x P^{n_r}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiProjSpace {
    dims: Vec<u32>,
}

impl MultiProjSpace {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.is_empty() {
            return Err(IntersectionError::InvalidSpace("need at least one factor".into()));
        }
        if dims.contains(&0) {
            return Err(IntersectionError::InvalidSpace(format!(
                "{dims:?} has a zero-dimensional factor"
            )));
        }
        Ok(MultiProjSpace { dims })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn dimension(&self) -> u32 {
        self.dims.iter().sum()
    }
}

/// An integer polynomial in the hyperplane classes `H_1, ..., H_r` modulo
/// `H_i^{n_i + 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiClass {
    space: MultiProjSpace,
    coeffs: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiClass {
    pub fn zero(space: &MultiProjSpace) -> Self {
        MultiClass {
            space: space.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(space: &MultiProjSpace) -> Self {
        Self::monomial(space, vec![0; space.factors()], BigInt::one()).expect("zero exponents are in range")
    }

    /// `c * H^e`; exponents above `n_i` give the zero class.
    pub fn monomial(space: &MultiProjSpace, exps: Vec<u32>, c: BigInt) -> Result<Self> {
        if exps.len() != space.factors() {
            return Err(IntersectionError::BadIndexing(format!(
                "exponent tuple has length {}, space has {} factors",
                exps.len(),
                space.factors()
            )));
        }
        let mut out = Self::zero(space);
        if exps.iter().zip(&space.dims).all(|(e, n)| e <= n) && !c.is_zero() {
            out.coeffs.insert(exps, c);
        }
        Ok(out)
    }

    /// The hyperplane class `H_i` (0-based index).
    pub fn hyperplane(space: &MultiProjSpace, i: usize) -> Result<Self> {
        if i >= space.factors() {
            return Err(IntersectionError::BadIndexing(format!("no factor {i}")));
        }
        let mut e = vec![0; space.factors()];
        e[i] = 1;
        Self::monomial(space, e, BigInt::one())
    }

    /// `O(a_1, ..., a_r) = a_1 H_1 + ... + a_r H_r`.
    pub fn line_bundle(space: &MultiProjSpace, a: &[i64]) -> Result<Self> {
        if a.len() != space.factors() {
            return Err(IntersectionError::BadIndexing(format!(
                "multidegree has length {}, space has {} factors",
                a.len(),
                space.factors()
            )));
        }
        let mut out = Self::zero(space);
        for (i, &ai) in a.iter().enumerate() {
            let h = Self::hyperplane(space, i)?.scale(&BigInt::from(ai));
            out = out.add(&h)?;
        }
        Ok(out)
    }

    pub fn space(&self) -> &MultiProjSpace {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.coeffs.get(exps).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(IntersectionError::SpaceMismatch);
        }
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            let v = out.coeffs.remove(e).unwrap_or_default() + c;
            if !v.is_zero() {
                out.coeffs.insert(e.clone(), v);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(&self.space);
        }
        MultiClass {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    /// Product with truncation `H_i^{n_i + 1} = 0`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(IntersectionError::SpaceMismatch);
        }
        let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.coeffs {
            'inner: for (e2, c2) in &other.coeffs {
                let mut e = Vec::with_capacity(e1.len());
                for ((a, b), n) in e1.iter().zip(e2).zip(&self.space.dims) {
                    if a + b > *n {
                        continue 'inner;
                    }
                    e.push(a + b);
                }
                *out.entry(e).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(MultiClass {
            space: self.space.clone(),
            coeffs: out,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.space);
        for _ in 0..k {
            acc = acc.mul(self).expect("same space");
        }
        acc
    }

    /// Coefficient of the top class `H_1^{n_1} ... H_r^{n_r}`.
    pub fn intersection_number(&self) -> BigInt {
        self.coefficient(&self.space.dims)
    }
}

impl fmt::Display for MultiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    write!(f, "*H{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

/// `mc_mul` as a free function.
pub fn mc_mul(u: &MultiClass, v: &MultiClass) -> Result<MultiClass> {
    u.mul(v)
}

pub fn intersection_number(v: &MultiClass) -> BigInt {
    v.intersection_number()
}

/// `(D_l, D'_l)` from `D_{l+1} = 4 D_l`, `D'_{l+1} = D' + 4 D'_l`,
/// `(D_1, D'_1) = (4, D')`.
pub fn graph_degree_recurrence(l: u32, dprime: &BigInt) -> Result<(BigInt, BigInt)> {
    if l == 0 {
        return Err(IntersectionError::InvalidArgument("l must be at least 1".into()));
    }
    if dprime.is_negative() {
        return Err(IntersectionError::InvalidArgument("D' must be nonnegative".into()));
    }
    let four = BigInt::from(4);
    let mut d = four.clone();
    let mut dp = dprime.clone();
    for _ in 1..l {
        d = &d * &four;
        dp = dprime + &four * &dp;
    }
    let p = num_traits::pow(four, l as usize);
    assert_eq!(d, p, "D_l = 4^l");
    assert_eq!(&dp * 3, (&p - 1) * dprime, "3 D'_l = (4^l - 1) D'");
    Ok((d, dp))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MfBound {
    pub exact_sum: BigInt,
    pub simplified: BigInt,
}

fn factorials(n: u32) -> Vec<BigInt> {
    let mut f = vec![BigInt::one()];
    for k in 1..=n {
        let next = &f[k as usize - 1] * k;
        f.push(next);
    }
    f
}

/// The constrained multinomial sum
/// `sum a_{ip} (d-1; j', p') (n; i'', j'', p'') D_l^{i''} D'_l^{p''}` over
/// `i + i'' = n`, `j' + j'' = n`, `j' + p' = d - 1`, `1 + p + p' + p'' = m`,
/// and its simplified bound `(4^l D')^{d-1} 2^{d-1} 3^n sum a_{ip}`.
pub fn mf_upper_bound(
    d: u32,
    n: u32,
    m: u32,
    l: u32,
    dprime: &BigInt,
    a: &BTreeMap<(u32, u32), BigInt>,
) -> Result<MfBound> {
    if d == 0 {
        return Err(IntersectionError::InvalidArgument("d must be at least 1".into()));
    }
    let total = (n + m) as i64 - d as i64;
    for ((i, p), c) in a {
        if *i as i64 + *p as i64 != total {
            return Err(IntersectionError::BadIndexing(format!(
                "a[{i},{p}] has i + p != n + m - d = {total}"
            )));
        }
        if c.is_negative() {
            return Err(IntersectionError::BadIndexing(format!("a[{i},{p}] = {c} is negative")));
        }
    }
    let (dl, dpl) = graph_degree_recurrence(l, dprime)?;
    let fact = factorials(n.max(d));
    let mut exact = BigInt::zero();
    for ((i, p), c) in a {
        if c.is_zero() || *i > n {
            continue;
        }
        let i2 = n - i;
        for j1 in 0..d {
            let p1 = d - 1 - j1;
            if j1 > n {
                continue;
            }
            let j2 = n - j1;
            let Some(p2) = n.checked_sub(i2 + j2) else { continue };
            if 1 + p + p1 + p2 != m {
                continue;
            }
            let m1 = &fact[(d - 1) as usize] / (&fact[j1 as usize] * &fact[p1 as usize]);
            let m2 = &fact[n as usize] / (&fact[i2 as usize] * &fact[j2 as usize] * &fact[p2 as usize]);
            exact += c * m1 * m2 * num_traits::pow(dl.clone(), i2 as usize) * num_traits::pow(dpl.clone(), p2 as usize);
        }
    }
    let sum_a: BigInt = a.values().sum();
    let base = num_traits::pow(BigInt::from(4), l as usize) * dprime;
    let simplified = num_traits::pow(base, (d - 1) as usize)
        * num_traits::pow(BigInt::from(2), (d - 1) as usize)
        * num_traits::pow(BigInt::from(3), n as usize)
        * sum_a;
    Ok(MfBound {
        exact_sum: exact,
        simplified,
    })
}

/// `Fd > d c1 N^2 MFd1`, exactly.
pub fn siu_bigness_check(fd: &BigInt, mfd1: &BigInt, d: u32, c1: &BigRational, n: u64) -> bool {
    siu_bigness_check_rational(
        &BigRational::from_integer(fd.clone()),
        &BigRational::from_integer(mfd1.clone()),
        d,
        c1,
        n,
    )
}

/// As [`siu_bigness_check`] with rational intersection data.
pub fn siu_bigness_check_rational(fd: &BigRational, mfd1: &BigRational, d: u32, c1: &BigRational, n: u64) -> bool {
    let n2 = BigRational::from_integer(BigInt::from(n) * BigInt::from(n));
    let rhs = BigRational::from_integer(d.into()) * c1 * n2 * mfd1;
    *fd > rhs
}

/// `kappa / (2 c d)`, the midpoint of the admissible interval `(0, kappa / (c d))`.
pub fn admissible_c1(kappa: &BigRational, c: &BigRational, d: u32) -> Result<BigRational> {
    if !kappa.is_positive() || !c.is_positive() {
        return Err(IntersectionError::NonPositive);
    }
    if d == 0 {
        return Err(IntersectionError::InvalidArgument("d must be at least 1".into()));
    }
    Ok(kappa / (c * BigRational::from_integer(BigInt::from(2 * d as u64))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(d: &[u32]) -> MultiProjSpace {
        MultiProjSpace::new(d.to_vec()).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn products_on_p1_p1() {
        let s = sp(&[1, 1]);
        let h1 = MultiClass::hyperplane(&s, 0).unwrap();
        assert!(h1.mul(&h1).unwrap().is_zero());
        let o11 = MultiClass::line_bundle(&s, &[1, 1]).unwrap();
        let sq = o11.mul(&o11).unwrap();
        assert_eq!(sq.coefficient(&[1, 1]), big(2));
        assert_eq!(sq.terms().count(), 1);
        assert_eq!(sq.intersection_number(), big(2));
        assert_eq!(MultiClass::one(&s).mul(&o11).unwrap(), o11);
    }

    #[test]
    fn top_class_and_cube() {
        let s = sp(&[1, 1, 1]);
        let top = MultiClass::monomial(&s, vec![1, 1, 1], big(1)).unwrap();
        assert_eq!(top.intersection_number(), big(1));
        assert_eq!(
            MultiClass::line_bundle(&s, &[1, 1, 1])
                .unwrap()
                .pow(3)
                .intersection_number(),
            big(6)
        );
    }

    #[test]
    fn mismatched_spaces() {
        let a = MultiClass::one(&sp(&[1]));
        let b = MultiClass::one(&sp(&[2]));
        assert_eq!(a.mul(&b), Err(IntersectionError::SpaceMismatch));
        assert!(MultiProjSpace::new(vec![]).is_err());
        assert!(MultiProjSpace::new(vec![0, 1]).is_err());
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(graph_degree_recurrence(1, &big(7)).unwrap(), (big(4), big(7)));
        assert_eq!(graph_degree_recurrence(2, &big(3)).unwrap(), (big(16), big(15)));
        assert_eq!(graph_degree_recurrence(3, &big(1)).unwrap(), (big(64), big(21)));
        assert!(graph_degree_recurrence(0, &big(1)).is_err());
    }

    #[test]
    fn mf_examples() {
        let a = BTreeMap::from([((0, 1), big(1)), ((1, 0), big(1))]);
        let r = mf_upper_bound(2, 1, 2, 1, &big(1), &a).unwrap();
        assert_eq!(r.simplified, big(48));
        assert_eq!(r.exact_sum, big(6));
        let zero = BTreeMap::from([((0, 1), big(0))]);
        let z = mf_upper_bound(2, 1, 2, 1, &big(1), &zero).unwrap();
        assert_eq!((z.exact_sum, z.simplified), (big(0), big(0)));
        let bad = BTreeMap::from([((1, 1), big(1))]);
        assert!(matches!(
            mf_upper_bound(2, 1, 2, 1, &big(1), &bad),
            Err(IntersectionError::BadIndexing(_))
        ));
    }

    #[test]
    fn mf_with_d_one() {
        // d = 1: j' = p' = 0, so j'' = n, i'' + p'' = 0 and i = n.
        let a = BTreeMap::from([((2, 1), big(5))]);
        let r = mf_upper_bound(1, 2, 2, 3, &big(2), &a).unwrap();
        assert_eq!(r.simplified, big(9 * 5));
        assert_eq!(r.exact_sum, big(5));
    }

    #[test]
    fn siu_examples() {
        let c = |n: i64| BigRational::from_integer(big(n));
        assert!(siu_bigness_check(&big(100), &big(10), 2, &c(4), 1));
        assert!(!siu_bigness_check(&big(100), &big(10), 2, &c(5), 1));
        let v = admissible_c1(&c(10), &c(1), 2).unwrap();
        assert_eq!(v, BigRational::new(big(5), big(2)));
        assert_eq!(
            admissible_c1(&c(1), &c(1), 1).unwrap(),
            BigRational::new(big(1), big(2))
        );
        assert_eq!(admissible_c1(&c(0), &c(1), 1), Err(IntersectionError::NonPositive));
    }
}
