use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{CountingError, Result};

pub const DEFAULT_TUPLE_BUDGET: u64 = 1_000_000;

/// A multihomogeneous polynomial on `(P^n)^M`: each term carries one exponent
/// vector of length `n + 1` per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    n: usize,
    m: usize,
    terms: Vec<(BigRational, Vec<Vec<u32>>)>,
}

impl MultiPoly {
    pub fn new(n: usize, m: usize, terms: Vec<(BigRational, Vec<Vec<u32>>)>) -> Result<Self> {
        if m == 0 {
            return Err(CountingError::InvalidArgument("M must be at least 1".into()));
        }
        // Like terms are merged first so that cancelling input is recognised as zero.
        let mut merged: BTreeMap<Vec<Vec<u32>>, BigRational> = BTreeMap::new();
        for (c, exps) in terms {
            *merged.entry(exps).or_insert_with(BigRational::zero) += c;
        }
        let terms: Vec<_> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c, e))
            .collect();
        let mut degrees: Option<Vec<u32>> = None;
        for (_, exps) in &terms {
            if exps.len() != m || exps.iter().any(|e| e.len() != n + 1) {
                return Err(CountingError::InvalidArgument(format!(
                    "each term needs {m} exponent vectors of length {}",
                    n + 1
                )));
            }
            let d: Vec<u32> = exps.iter().map(|e| e.iter().sum()).collect();
            match &degrees {
                None => degrees = Some(d),
                Some(prev) if *prev != d => {
                    return Err(CountingError::InvalidArgument(format!(
                        "not multihomogeneous: multidegrees {prev:?} and {d:?}"
                    )))
                }
                _ => {}
            }
        }
        Ok(MultiPoly { n, m, terms })
    }

    /// A polynomial in the coordinates of a single factor `k`.
    pub fn in_factor(n: usize, m: usize, k: usize, terms: Vec<(BigRational, Vec<u32>)>) -> Result<Self> {
        if k >= m {
            return Err(CountingError::InvalidArgument(format!(
                "factor {k} out of range for M = {m}"
            )));
        }
        let terms = terms
            .into_iter()
            .map(|(c, e)| {
                let mut exps = vec![vec![0; n + 1]; m];
                exps[k] = e;
                (c, exps)
            })
            .collect();
        Self::new(n, m, terms)
    }

    pub fn product(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if self.n != other.n || self.m != other.m {
            return Err(CountingError::InvalidArgument(
                "factors live on different spaces".into(),
            ));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                let exps = e1
                    .iter()
                    .zip(e2)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                    .collect();
                terms.push((c1 * c2, exps));
            }
        }
        Self::new(self.n, self.m, terms)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> usize {
        self.m
    }

    /// Multidegree, or `None` for the zero polynomial.
    pub fn multidegree(&self) -> Option<Vec<u32>> {
        self.terms
            .first()
            .map(|(_, e)| e.iter().map(|v| v.iter().sum()).collect())
    }

    pub fn total_degree(&self) -> u32 {
        self.multidegree().map(|d| d.iter().sum()).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the polynomial vanishes at the tuple of integer representatives.
    fn vanishes_at(&self, tuple: &[&Vec<BigInt>]) -> bool {
        let mut sum = BigRational::zero();
        for (c, exps) in &self.terms {
            let mut prod = BigInt::one();
            for (pt, e) in tuple.iter().zip(exps) {
                for (x, &k) in pt.iter().zip(e) {
                    if k > 0 {
                        prod *= Pow::pow(x, k);
                    }
                }
            }
            sum += c * BigRational::from_integer(prod);
        }
        sum.is_zero()
    }
}

/// Clears denominators so that evaluation stays in the integers; vanishing
/// of a homogeneous form does not depend on the representative.
fn primitive_representative(p: &[BigRational]) -> Result<Vec<BigInt>> {
    if p.iter().all(|x| x.is_zero()) {
        return Err(CountingError::InvalidArgument(
            "the zero vector is not a projective point".into(),
        ));
    }
    let lcm = p.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    Ok(p.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
}

/// True iff some tuple of `sigma^M` fails one of the polynomials of `z`.
pub fn alon_test(sigma: &[Vec<BigRational>], z: &[MultiPoly], m: usize, budget: u64) -> Result<bool> {
    if m == 0 {
        return Err(CountingError::InvalidArgument("M must be at least 1".into()));
    }
    let tuples = (sigma.len() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if tuples > budget as u128 {
        return Err(CountingError::BudgetExceeded { tuples, budget });
    }
    for f in z {
        if f.factors() != m {
            return Err(CountingError::InvalidArgument(format!(
                "polynomial has {} factors, expected {m}",
                f.factors()
            )));
        }
        if sigma.iter().any(|p| p.len() != f.ambient_dim() + 1) {
            return Err(CountingError::InvalidArgument(format!(
                "points must have {} coordinates",
                f.ambient_dim() + 1
            )));
        }
    }
    let reps: Vec<Vec<BigInt>> = sigma
        .iter()
        .map(|p| primitive_representative(p))
        .collect::<Result<_>>()?;
    if z.is_empty() || reps.is_empty() {
        return Ok(false);
    }
    let s = reps.len() as u64;
    let witness = (0..tuples as u64).into_par_iter().find_any(|&idx| {
        let mut rest = idx;
        let tuple: Vec<&Vec<BigInt>> = (0..m)
            .map(|_| {
                let i = (rest % s) as usize;
                rest /= s;
                &reps[i]
            })
            .collect();
        z.iter().any(|f| !f.vanishes_at(&tuple))
    });
    Ok(witness.is_some())
}

/// Conservative size of `Sigma` forcing `Sigma^M` out of `Z`, with the
/// Bezout product `deg Z * deg C^M` standing in for both the component count
/// and the fiber degree.
pub fn alon_bound(m: u32, deg_c: u32, deg_z: u32) -> Result<BigInt> {
    if m == 0 || deg_c == 0 || deg_z == 0 {
        return Err(CountingError::InvalidArgument(
            "M, deg C and deg Z must all be at least 1".into(),
        ));
    }
    Ok(alon_bound_big(m, &BigInt::from(deg_c), &BigInt::from(deg_z)))
}

fn alon_bound_big(m: u32, deg_c: &BigInt, deg_z: &BigInt) -> BigInt {
    if m == 1 {
        return deg_c * deg_z + 1;
    }
    let bezout = deg_z * Pow::pow(deg_c, m);
    let fiber = alon_bound_big(m - 1, deg_c, &bezout);
    fiber.max(bezout + 1)
}

/// Which curve of `P^2` the points of `Sigma` are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridCurve {
    /// `X2 = 0`, points `[1 : t : 0]`.
    Line,
    /// `X0 X2 = X1^2`, points `[1 : t : t^2]`.
    Conic,
}

impl GridCurve {
    pub fn degree(self) -> u32 {
        match self {
            GridCurve::Line => 1,
            GridCurve::Conic => 2,
        }
    }

    pub fn point(self, t: i64) -> Vec<BigRational> {
        let q = |v: i64| BigRational::from_integer(v.into());
        match self {
            GridCurve::Line => vec![q(1), q(t), q(0)],
            GridCurve::Conic => vec![q(1), q(t), q(t * t)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlonCounterexample {
    pub curve: GridCurve,
    pub m: u32,
    pub family: String,
    pub sigma_size: usize,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlonGridReport {
    /// `(curve, M, family)` instances with `C^M` not inside `Z`.
    pub instances: usize,
    /// Instances skipped because `C^M` lies inside `Z`.
    pub contained: usize,
    /// Calls with `|Sigma| >= bound`.
    pub checked: usize,
    /// Calls with `|Sigma| < bound`, run for completeness.
    pub below_bound: usize,
    pub counterexamples: Vec<AlonCounterexample>,
}

/// Named polynomial systems on `(P^2)^M` of total degree at most 3.
pub fn grid_systems(m: usize) -> Vec<(String, Vec<MultiPoly>)> {
    let q = |v: i64| BigRational::from_integer(v.into());
    // X1 - k X0 in factor f.
    let linear = |f: usize, k: i64| MultiPoly::in_factor(2, m, f, vec![(q(1), vec![0, 1, 0]), (q(-k), vec![1, 0, 0])]);
    let mut out = Vec::new();
    for d in 1..=3i64 {
        let mut f = linear(0, 0).expect("valid factor");
        for k in 1..d {
            f = f.product(&linear(0, k).expect("valid factor")).expect("same space");
        }
        out.push((format!("roots_0..{}", d - 1), vec![f]));
    }
    out.push((
        "x2".into(),
        vec![MultiPoly::in_factor(2, m, 0, vec![(q(1), vec![0, 0, 1])]).expect("valid factor")],
    ));
    out.push((
        "conic".into(),
        vec![MultiPoly::in_factor(2, m, 0, vec![(q(1), vec![1, 0, 1]), (q(-1), vec![0, 2, 0])]).expect("valid factor")],
    ));
    if m >= 2 {
        // x^(0)_1 x^(1)_0 - x^(0)_0 x^(1)_1 vanishes where t_0 = t_1.
        let diag = MultiPoly::new(
            2,
            m,
            vec![
                (
                    q(1),
                    (0..m)
                        .map(|k| {
                            if k == 0 {
                                vec![0, 1, 0]
                            } else if k == 1 {
                                vec![1, 0, 0]
                            } else {
                                vec![0, 0, 0]
                            }
                        })
                        .collect(),
                ),
                (
                    q(-1),
                    (0..m)
                        .map(|k| {
                            if k == 0 {
                                vec![1, 0, 0]
                            } else if k == 1 {
                                vec![0, 1, 0]
                            } else {
                                vec![0, 0, 0]
                            }
                        })
                        .collect(),
                ),
            ],
        )
        .expect("multihomogeneous");
        out.push(("diagonal".into(), vec![diag.clone()]));
        out.push((
            "diagonal_times_root".into(),
            vec![diag
                .product(&linear(m - 1, 1).expect("valid factor"))
                .expect("same space")],
        ));
        out.push((
            "two_roots".into(),
            vec![linear(0, 0).expect("valid factor"), linear(1, 1).expect("valid factor")],
        ));
    }
    out
}

/// Whether every polynomial vanishes on all of `C^M`; exact, since each
/// polynomial restricted to `C^M` has degree at most 6 in each parameter and
/// is sampled on a 7-point grid per factor.
fn contains_curve_power(curve: GridCurve, z: &[MultiPoly], m: usize) -> Result<bool> {
    let pts: Vec<Vec<BigRational>> = (0..7).map(|t| curve.point(1000 + 7 * t)).collect();
    Ok(!alon_test(&pts, z, m, u64::MAX)?)
}

/// Runs `alon_test` for every `|Sigma| <= alon_bound + 2` over lines and
/// conics in `P^2`, `M <= max_m`, and the systems of [`grid_systems`].
pub fn alon_grid(max_m: u32, budget: u64) -> Result<AlonGridReport> {
    let mut report = AlonGridReport {
        instances: 0,
        contained: 0,
        checked: 0,
        below_bound: 0,
        counterexamples: Vec::new(),
    };
    for curve in [GridCurve::Line, GridCurve::Conic] {
        for m in 1..=max_m {
            for (family, z) in grid_systems(m as usize) {
                if contains_curve_power(curve, &z, m as usize)? {
                    report.contained += 1;
                    continue;
                }
                report.instances += 1;
                let deg_z = z.iter().map(|f| f.total_degree()).max().unwrap_or(1).max(1);
                let bound = alon_bound(m, curve.degree(), deg_z)?;
                let top = usize::try_from(&bound + 2u32)
                    .map_err(|_| CountingError::InvalidArgument("bound exceeds usize".into()))?;
                let sigma: Vec<Vec<BigRational>> = (0..top as i64).map(|t| curve.point(t)).collect();
                for size in 1..=top {
                    let outside = alon_test(&sigma[..size], &z, m as usize, budget)?;
                    if BigInt::from(size) >= bound {
                        report.checked += 1;
                        if !outside {
                            report.counterexamples.push(AlonCounterexample {
                                curve,
                                m,
                                family: family.clone(),
                                sigma_size: size,
                                bound: bound.to_string(),
                            });
                        }
                    } else {
                        report.below_bound += 1;
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn bound_examples() {
        assert_eq!(alon_bound(1, 2, 3).unwrap(), BigInt::from(7));
        assert_eq!(alon_bound(2, 2, 3).unwrap(), BigInt::from(25));
        assert_eq!(alon_bound(3, 2, 3).unwrap(), BigInt::from(193));
        assert!(alon_bound(0, 1, 1).is_err());
        for m in 1..4 {
            for c in 1..4 {
                for d in 1..4 {
                    assert!(alon_bound(m, c, d + 1).unwrap() >= alon_bound(m, c, d).unwrap());
                    assert!(alon_bound(m, c + 1, d).unwrap() >= alon_bound(m, c, d).unwrap());
                    assert!(alon_bound(m + 1, c, d).unwrap() >= alon_bound(m, c, d).unwrap());
                }
            }
        }
    }

    #[test]
    fn test_examples() {
        let sigma = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert!(!alon_test(&sigma, &[], 2, DEFAULT_TUPLE_BUDGET).unwrap());
        let y0 = MultiPoly::in_factor(1, 2, 0, vec![(q(1), vec![1, 0])]).unwrap();
        assert!(alon_test(&sigma, std::slice::from_ref(&y0), 2, DEFAULT_TUPLE_BUDGET).unwrap());
        assert!(!alon_test(&sigma[1..], &[y0], 2, DEFAULT_TUPLE_BUDGET).unwrap());
    }

    #[test]
    fn single_factor_is_pointwise() {
        // X1 (X1 - X0) vanishes at [1:0] and [1:1] only.
        let f = MultiPoly::in_factor(1, 1, 0, vec![(q(1), vec![0, 2]), (q(-1), vec![1, 1])]).unwrap();
        let pts: Vec<Vec<BigRational>> = (0..4).map(|t| vec![q(1), q(t)]).collect();
        assert!(!alon_test(&pts[..2], std::slice::from_ref(&f), 1, 100).unwrap());
        assert!(alon_test(&pts[..3], &[f], 1, 100).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let sigma: Vec<Vec<BigRational>> = (0..11).map(|t| vec![q(1), q(t)]).collect();
        assert!(matches!(
            alon_test(&sigma, &[], 6, 1_000_000),
            Err(CountingError::BudgetExceeded { .. })
        ));
        let mixed = MultiPoly::new(1, 1, vec![(q(1), vec![vec![1, 0]]), (q(1), vec![vec![2, 0]])]);
        assert!(mixed.is_err());
        assert!(alon_test(&[vec![q(0), q(0)]], &[], 1, 10).is_err());
    }

    #[test]
    fn grid_m1_has_no_counterexamples() {
        let r = alon_grid(1, DEFAULT_TUPLE_BUDGET).unwrap();
        assert!(r.counterexamples.is_empty());
        // x2 contains the line and the conic contains itself.
        assert_eq!(r.contained, 2);
        assert_eq!(r.instances, 8);
    }

    #[test]
    fn like_terms_cancel() {
        let f = MultiPoly::in_factor(1, 1, 0, vec![(q(2), vec![0, 1]), (q(-2), vec![0, 1])]).unwrap();
        assert!(f.is_zero());
        let g = MultiPoly::in_factor(1, 1, 0, vec![(q(1), vec![0, 1]), (q(1), vec![0, 1])]).unwrap();
        assert_eq!(g, MultiPoly::in_factor(1, 1, 0, vec![(q(2), vec![0, 1])]).unwrap());
    }

    #[test]
    fn rational_points_use_integer_representatives() {
        let f = MultiPoly::in_factor(1, 1, 0, vec![(q(2), vec![0, 1]), (q(-1), vec![1, 0])]).unwrap();
        let half = vec![q(1), BigRational::new(1.into(), 2.into())];
        assert!(!alon_test(&[half], &[f], 1, 10).unwrap());
    }
}
