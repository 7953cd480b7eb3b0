use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::curve::{CurvePoint, WeierstrassCurve};
use super::periods::periods_legendre;
use super::weierstrass::elliptic_log;
use super::{EllipticError, Result};
use crate::siegel::{Chart, SiegelError, SiegelPoint};

/// Named sections of the Legendre family `y^2 = x(x-1)(x-lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegendreSection {
    /// `(2, sqrt(2 (2 - lambda)))`, principal square root.
    ConstX2,
    /// `(0, 0)`.
    TwoTorsion0,
    /// `(1, 0)`.
    TwoTorsion1,
}

impl LegendreSection {
    pub const ALL: [LegendreSection; 3] = [
        LegendreSection::ConstX2,
        LegendreSection::TwoTorsion0,
        LegendreSection::TwoTorsion1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LegendreSection::ConstX2 => "const_x2",
            LegendreSection::TwoTorsion0 => "two_torsion_0",
            LegendreSection::TwoTorsion1 => "two_torsion_1",
        }
    }

    pub fn is_torsion(self) -> bool {
        !matches!(self, LegendreSection::ConstX2)
    }
}

impl fmt::Display for LegendreSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LegendreSection {
    type Err = EllipticError;

    fn from_str(s: &str) -> Result<Self> {
        LegendreSection::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| EllipticError::UnknownSection(s.to_string()))
    }
}

fn check_lambda(lambda: C64) -> Result<()> {
    if !lambda.is_finite() || lambda.norm() == 0.0 || (lambda - 1.0).norm() == 0.0 {
        return Err(EllipticError::Singular);
    }
    Ok(())
}

/// The section evaluated on the fiber `E_lambda`.
pub fn legendre_section(section: LegendreSection, lambda: C64) -> Result<CurvePoint<C64>> {
    check_lambda(lambda)?;
    let zero = C64::new(0.0, 0.0);
    Ok(match section {
        LegendreSection::TwoTorsion0 => CurvePoint::affine(zero, zero),
        LegendreSection::TwoTorsion1 => CurvePoint::affine(C64::new(1.0, 0.0), zero),
        LegendreSection::ConstX2 => {
            let r = (C64::new(2.0, 0.0) - lambda) * 2.0;
            // Principal sqrt is discontinuous across the negative reals.
            if r.im == 0.0 && r.re < 0.0 {
                return Err(EllipticError::BranchCut(format!("{lambda}")));
            }
            CurvePoint::affine(C64::new(2.0, 0.0), r.sqrt())
        }
    })
}

/// Exact rational section, or `None` when the `y`-coordinate is irrational.
pub fn legendre_section_rational(section: LegendreSection, lambda: &BigRational) -> Option<CurvePoint<BigRational>> {
    if lambda.is_zero() || *lambda == BigRational::from_integer(1.into()) {
        return None;
    }
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));
    match section {
        LegendreSection::TwoTorsion0 => Some(CurvePoint::affine(int(0), int(0))),
        LegendreSection::TwoTorsion1 => Some(CurvePoint::affine(int(1), int(0))),
        LegendreSection::ConstX2 => {
            let r = (int(2) - lambda) * int(2);
            rational_sqrt(&r).map(|y| CurvePoint::affine(int(2), y))
        }
    }
}

/// Nonnegative square root of a rational that is a perfect square.
pub(crate) fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    (&sn * &sn == *n && &sd * &sd == *d).then(|| BigRational::new(sn, sd))
}

/// `t -> (tau(lambda), log(P(lambda)) / w1(lambda))` with
/// `lambda = lambda0 + t_1 + i t_2`.
#[derive(Debug, Clone, Copy)]
pub struct LegendreChart {
    pub lambda0: C64,
    pub section: LegendreSection,
}

impl LegendreChart {
    pub fn new(lambda0: C64, section: LegendreSection) -> Result<Self> {
        check_lambda(lambda0)?;
        periods_legendre(lambda0)?;
        legendre_section(section, lambda0)?;
        Ok(LegendreChart { lambda0, section })
    }

    pub fn lambda(&self, t: &[f64]) -> C64 {
        self.lambda0 + C64::new(t[0], t[1])
    }
}

impl Chart for LegendreChart {
    fn param_dim(&self) -> usize {
        2
    }

    fn genus(&self) -> usize {
        1
    }

    fn eval(&self, t: &[f64]) -> std::result::Result<(SiegelPoint, DVector<C64>), SiegelError> {
        let inner = || -> Result<(SiegelPoint, DVector<C64>)> {
            let lambda = self.lambda(t);
            let lattice = periods_legendre(lambda)?;
            let curve = WeierstrassCurve::legendre(lambda)?;
            let p = legendre_section(self.section, lambda)?;
            let z = elliptic_log(&curve, &p, &lattice)?;
            Ok((
                SiegelPoint::scalar(lattice.tau())?,
                DVector::from_element(1, z / lattice.w1()),
            ))
        };
        inner().map_err(|e| match e {
            EllipticError::Siegel(s) => s,
            other => SiegelError::Chart(other.to_string()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel::{numerical_betti_rank, RankOptions};

    #[test]
    fn const_x2_at_half() {
        let p = legendre_section(LegendreSection::ConstX2, C64::new(0.5, 0.0)).unwrap();
        assert_eq!(p.x().unwrap(), &C64::new(2.0, 0.0));
        assert!((p.y().unwrap() - C64::new(3f64.sqrt(), 0.0)).norm() < 1e-15);
        let e = WeierstrassCurve::legendre(C64::new(0.5, 0.0)).unwrap();
        assert!(e.contains(&p));
    }

    #[test]
    fn names_round_trip() {
        for s in LegendreSection::ALL {
            assert_eq!(s.name().parse::<LegendreSection>().unwrap(), s);
        }
        assert!("nope".parse::<LegendreSection>().is_err());
    }

    #[test]
    fn rational_section_only_when_square() {
        let half = BigRational::new(1.into(), 2.into());
        assert!(legendre_section_rational(LegendreSection::ConstX2, &half).is_none());
        // lambda = 2 - s^2/2 with s = 3/2 gives lambda = 7/8 and y = 3/2.
        let l = BigRational::new(7.into(), 8.into());
        let p = legendre_section_rational(LegendreSection::ConstX2, &l).unwrap();
        assert_eq!(p.y().unwrap(), &BigRational::new(3.into(), 2.into()));
        assert!(WeierstrassCurve::legendre(l).unwrap().contains(&p));
    }

    #[test]
    fn torsion_section_rank_zero_and_const_x2_rank_two() {
        let opts = RankOptions::default();
        let t = LegendreChart::new(C64::new(0.3, 0.0), LegendreSection::TwoTorsion0).unwrap();
        assert_eq!(numerical_betti_rank(&t, &[0.0, 0.0], &opts).unwrap().rank, 0);
        let c = LegendreChart::new(C64::new(0.3, 0.0), LegendreSection::ConstX2).unwrap();
        let r = numerical_betti_rank(&c, &[0.0, 0.0], &opts).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.stable);
        assert!(r.singular_values[1] / r.singular_values[0] > 1e-3);
    }

    #[test]
    fn chart_rejects_excluded_lambda() {
        assert!(LegendreChart::new(C64::new(1.0, 0.0), LegendreSection::ConstX2).is_err());
        assert!(LegendreChart::new(C64::new(0.0, 0.0), LegendreSection::TwoTorsion0).is_err());
    }
}
