use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::tate::{tate_limit_height, TateOptions};
use super::weil::rational_height;
use crate::elliptic::{legendre_section_rational, LegendreSection, WeierstrassCurve};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSample {
    pub index: usize,
    pub lambda: String,
    pub section: String,
    pub base_height: f64,
    pub naive: f64,
    pub canonical: f64,
    pub error_estimate: f64,
    pub torsion: bool,
    /// `|canonical - naive| / max(1, h(lambda))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSkip {
    pub index: usize,
    pub lambda: String,
    pub section: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub samples: Vec<ScanSample>,
    pub skips: Vec<ScanSkip>,
    pub sup_ratio: f64,
    /// Supremum over the first half of the `lambda` grid.
    pub sup_first_half: f64,
    /// `|sup_ratio - sup_first_half| / sup_ratio`, or 0 when the supremum is 0.
    pub relative_change: f64,
}

/// The first `count` values `lambda = 2 - s^2 / 2` with `s = p/q` in
/// `(sqrt 2, 2)`, ordered by `q` then `p`. They lie in `(0, 1)` and make the
/// `x = 2` section rational.
pub fn legendre_scan_grid(count: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(count);
    let mut q: i64 = 1;
    while out.len() < count {
        // sqrt(2) q < p < 2 q
        let lo = (2f64.sqrt() * q as f64).floor() as i64 + 1;
        for p in lo..2 * q {
            if out.len() == count {
                break;
            }
            if p.gcd(&q) != 1 || p * p <= 2 * q * q {
                continue;
            }
            let s = BigRational::new(BigInt::from(p), BigInt::from(q));
            out.push(BigRational::from_integer(2.into()) - &s * &s / BigRational::from_integer(2.into()));
        }
        q += 1;
    }
    out
}

/// Ratios `|h_hat(P) - h(P)| / max(1, h(lambda))` over a grid of `lambda` and
/// a list of sections. Heights are `x`-coordinate heights.
pub fn silverman_tate_scan(lambdas: &[BigRational], sections: &[LegendreSection], opts: &TateOptions) -> ScanReport {
    let jobs: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|i| (0..sections.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<(usize, std::result::Result<ScanSample, ScanSkip>)> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let lambda = &lambdas[i];
            let section = sections[j];
            let skip = |reason: String| ScanSkip {
                index: i,
                lambda: lambda.to_string(),
                section: section.name().to_string(),
                reason,
            };
            let run = || -> std::result::Result<ScanSample, ScanSkip> {
                let curve = WeierstrassCurve::legendre(lambda.clone()).map_err(|e| skip(e.to_string()))?;
                let p = legendre_section_rational(section, lambda)
                    .ok_or_else(|| skip("section is not rational on this fiber".into()))?;
                let base = rational_height(lambda);
                let o = TateOptions {
                    base_height: base,
                    ..opts.clone()
                };
                let r = tate_limit_height(&curve, &p, &o).map_err(|e| skip(e.to_string()))?;
                Ok(ScanSample {
                    index: i,
                    lambda: lambda.to_string(),
                    section: section.name().to_string(),
                    base_height: base,
                    naive: r.naive,
                    canonical: r.canonical,
                    error_estimate: r.error_estimate,
                    torsion: r.torsion,
                    ratio: (r.canonical - r.naive).abs() / base.max(1.0),
                })
            };
            (i * sections.len() + j, run())
        })
        .collect();

    let mut results = results;
    results.sort_by_key(|(k, _)| *k);
    let mut samples = Vec::new();
    let mut skips = Vec::new();
    for (_, r) in results {
        match r {
            Ok(s) => samples.push(s),
            Err(s) => skips.push(s),
        }
    }
    let half = lambdas.len().div_ceil(2);
    let sup = |pred: &dyn Fn(&ScanSample) -> bool| {
        samples
            .iter()
            .filter(|s| pred(s))
            .map(|s| s.ratio)
            .fold(0.0f64, f64::max)
    };
    let sup_ratio = sup(&|_| true);
    let sup_first_half = sup(&|s| s.index < half);
    let relative_change = if sup_ratio > 0.0 {
        (sup_ratio - sup_first_half).abs() / sup_ratio
    } else {
        0.0
    };
    ScanReport {
        samples,
        skips,
        sup_ratio,
        sup_first_half,
        relative_change,
    }
}
