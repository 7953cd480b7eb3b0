use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{CountingError, Result};
use crate::elliptic::{CurvePoint, WeierstrassCurve};
use crate::heights::{tate_limit_height, TateOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyVerdict {
    /// Fewer than `c4` enumerated points are close to `P`.
    AlternativeII,
    ExceedsC4,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub verdict: DichotomyVerdict,
    pub count: u64,
    pub threshold: f64,
    /// Candidates with `h(Q - P) <= threshold`, in enumeration order.
    pub close: Vec<String>,
    /// `(id, h(Q - P))` for every candidate whose height was computed.
    pub heights: Vec<(String, f64)>,
    /// Per-candidate failures; the scan continues past them.
    pub errors: Vec<(String, String)>,
}

/// Counts enumerated `Q` with `h(Q - P) <= h_base / c3` and compares with
/// `c4`; `None` for `c4` means no bound.
pub fn dichotomy_scan(
    curve: &WeierstrassCurve<BigRational>,
    candidates: &[(String, CurvePoint<BigRational>)],
    p: &CurvePoint<BigRational>,
    c3: f64,
    c4: Option<u64>,
    h_base: f64,
    opts: &TateOptions,
) -> Result<DichotomyReport> {
    if !(c3 > 0.0) || !c3.is_finite() {
        return Err(CountingError::InvalidArgument(format!("c3 must be positive, got {c3}")));
    }
    if !(h_base >= 0.0) || !h_base.is_finite() {
        return Err(CountingError::InvalidArgument(format!(
            "h_base must be nonnegative, got {h_base}"
        )));
    }
    if !curve.contains(p) {
        return Err(CountingError::InvalidArgument("P is not on the curve".into()));
    }
    let threshold = h_base / c3;
    let results: Vec<(String, std::result::Result<f64, String>)> = candidates
        .par_iter()
        .map(|(id, q)| {
            let h = if curve.contains(q) {
                let diff = curve.sub(q, p);
                tate_limit_height(curve, &diff, opts)
                    .map(|r| r.canonical)
                    .map_err(|e| e.to_string())
            } else {
                Err("point is not on the curve".to_string())
            };
            (id.clone(), h)
        })
        .collect();
    let mut close = Vec::new();
    let mut heights = Vec::new();
    let mut errors = Vec::new();
    for (id, h) in results {
        match h {
            Ok(h) => {
                if h <= threshold {
                    close.push(id.clone());
                }
                heights.push((id, h));
            }
            Err(e) => errors.push((id, e)),
        }
    }
    let count = close.len() as u64;
    let verdict = match c4 {
        Some(c4) if count >= c4 => DichotomyVerdict::ExceedsC4,
        _ => DichotomyVerdict::AlternativeII,
    };
    Ok(DichotomyReport {
        verdict,
        count,
        threshold,
        close,
        heights,
        errors,
    })
}
