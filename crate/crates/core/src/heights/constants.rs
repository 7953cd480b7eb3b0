use std::collections::BTreeMap;

use serde::Serialize;

use super::{HeightError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssembledConstants {
    /// Least power of 2 with `N^2 >= 2 c0 / c1`.
    pub n: u64,
    /// `c1 / 2`.
    pub c1_final: f64,
    /// `(c2(N) + c0) / N^2`.
    pub c2_final: f64,
}

/// Turns `h_hat >= c1 h - c0` on `[N]`-multiples into a bound with
/// constants `(c1/2, (c2(N) + c0)/N^2)`.
pub fn assemble_constants(c0: f64, c1: f64, c2_of_n: impl Fn(u64) -> Option<f64>) -> Result<AssembledConstants> {
    if !(c0 >= 0.0) || !c0.is_finite() {
        return Err(HeightError::InvalidArgument(format!(
            "c0 must be a finite nonnegative number, got {c0}"
        )));
    }
    if !(c1 > 0.0) || !c1.is_finite() {
        return Err(HeightError::InvalidArgument(format!("c1 must be positive, got {c1}")));
    }
    let target = 2.0 * c0 / c1;
    let mut n: u64 = 1;
    while ((n as f64) * (n as f64)) < target {
        n = n
            .checked_mul(2)
            .ok_or_else(|| HeightError::InvalidArgument("N overflows u64".into()))?;
    }
    let c2 = c2_of_n(n).ok_or(HeightError::MissingC2(n))?;
    let nn = (n as f64) * (n as f64);
    Ok(AssembledConstants {
        n,
        c1_final: c1 / 2.0,
        c2_final: (c2 + c0) / nn,
    })
}

pub fn assemble_constants_map(c0: f64, c1: f64, c2: &BTreeMap<u64, f64>) -> Result<AssembledConstants> {
    assemble_constants(c0, c1, |n| c2.get(&n).copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c2 = BTreeMap::from([(4u64, 8.0)]);
        let a = assemble_constants_map(8.0, 1.0, &c2).unwrap();
        assert_eq!(
            a,
            AssembledConstants {
                n: 4,
                c1_final: 0.5,
                c2_final: 1.0
            }
        );
        let b = assemble_constants(0.0, 3.0, |_| Some(0.0)).unwrap();
        assert_eq!((b.n, b.c1_final), (1, 1.5));
        assert_eq!(
            assemble_constants_map(8.0, 1.0, &BTreeMap::new()),
            Err(HeightError::MissingC2(4))
        );
        assert!(assemble_constants(1.0, 0.0, |_| Some(0.0)).is_err());
    }

    #[test]
    fn n_is_least_power_of_two() {
        // 2 c0 / c1 = 17 needs N^2 >= 17, so N = 8 (4^2 = 16 is too small).
        assert_eq!(assemble_constants(8.5, 1.0, |_| Some(0.0)).unwrap().n, 8);
        assert_eq!(assemble_constants(2.0, 1.0, |_| Some(0.0)).unwrap().n, 2);
    }
}
