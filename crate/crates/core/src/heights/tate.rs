//! Canonical heights as the limit `t_l = h(x(2^l P)) / 4^l`.
//!
//! Writing `Delta_l = h_{l+1} - 4 h_l`, one has `t_{l+1} - t_l = Delta_l / 4^{l+1}`
//! and `|Delta_l| <= C` with `C` from [`DuplicationForms::defect_bound`], so
//! `|h_hat - t_l| <= C / (3 * 4^l)`. That bound is the reported error.
//!
//! The exact engine iterates coprime integer pairs `(n_l, d_l)` and pays for
//! it with a fourfold growth of digits per step. The split engine keeps the
//! exact pairs for a short prefix (which also detects torsion), then follows
//! the projective point in floating point for the archimedean term
//! `ln max(|F|, |G|)` and tracks `(n_l, d_l)` modulo a power of the resultant,
//! which is enough to recover `gcd(F(n, d), G(n, d))` exactly since that gcd
//! divides the resultant.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::forms::{x_duplication, DuplicationForms};
use super::weil::{big_ln, rational_height};
use super::{HeightError, Result};
use crate::elliptic::{CurvePoint, WeierstrassCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightEngine {
    /// Exact rational iterates throughout; limited by the digit budget.
    Exact,
    /// Exact prefix, then floating archimedean term plus exact gcds.
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Stop once `C / (3 * 4^l) <= tol`; the error estimate is that bound.
    Certified,
    /// Stop once `|t_l - t_{l-1}| < 3/4 tol`; the error estimate is
    /// `4/3 |t_l - t_{l-1}|`, which assumes a geometric tail.
    GeometricTail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TateOptions {
    pub tol: f64,
    pub engine: HeightEngine,
    pub stop_rule: StopRule,
    /// Largest decimal digit count allowed for an exact iterate.
    pub digit_budget: u64,
    pub max_levels: usize,
    /// Run two extra levels and check the estimate was conservative.
    pub paranoia: bool,
    /// Height of the base point, echoed into the report.
    pub base_height: f64,
    /// Iterate at least this many levels regardless of the stopping rule.
    pub min_levels: usize,
}

impl Default for TateOptions {
    fn default() -> Self {
        TateOptions {
            tol: 1e-10,
            engine: HeightEngine::Split,
            stop_rule: StopRule::Certified,
            digit_budget: 200_000,
            max_levels: 60,
            paranoia: false,
            base_height: 0.0,
            min_levels: 0,
        }
    }
}

impl TateOptions {
    pub fn with_tol(tol: f64) -> Self {
        TateOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightReport {
    /// `h(x(P))`.
    pub naive: f64,
    /// Limit of `h(x(2^l P)) / 4^l`; twice the height attached to the origin divisor.
    pub canonical: f64,
    pub error_estimate: f64,
    pub iterations: usize,
    pub base_height: f64,
    pub torsion: bool,
    pub divisor: &'static str,
    pub engine: HeightEngine,
    pub stop_rule: StopRule,
    /// `t_0, t_1, ..., t_iterations`.
    pub sequence: Vec<f64>,
    /// `4/3 |t_l - t_{l-1}|` at the final level.
    pub tail_estimate: f64,
    /// Bound `C` on every duplication defect.
    pub defect_bound: f64,
}

pub const X_DIVISOR: &str = "x-coordinate map (divisor 2*O, degree 2)";

impl HeightReport {
    fn torsion(naive: f64, base_height: f64, opts: &TateOptions, sequence: Vec<f64>, defect_bound: f64) -> Self {
        HeightReport {
            naive,
            canonical: 0.0,
            error_estimate: 0.0,
            iterations: sequence.len().saturating_sub(1),
            base_height,
            torsion: true,
            divisor: X_DIVISOR,
            engine: opts.engine,
            stop_rule: opts.stop_rule,
            sequence,
            tail_estimate: 0.0,
            defect_bound,
        }
    }

    /// Successive differences `t_{l+1} - t_l`.
    pub fn differences(&self) -> Vec<f64> {
        self.sequence.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The canonical height and error scaled by a positive factor, e.g. `1/2`
    /// for the height attached to the divisor `O`.
    pub fn rescaled(&self, factor: f64) -> (f64, f64) {
        (self.canonical * factor, self.error_estimate * factor)
    }
}

enum Step {
    Defect(f64),
    Torsion,
}

enum State {
    Exact {
        n: BigInt,
        d: BigInt,
        seen: HashSet<(BigInt, BigInt)>,
    },
    Split {
        u: f64,
        v: f64,
        rn: BigInt,
        rd: BigInt,
        modulus: BigInt,
    },
}

struct Iteration<'a> {
    forms: &'a DuplicationForms,
    state: State,
    level: usize,
    exact_prefix: Option<usize>,
    modulus_exponent: u32,
    budget: u64,
}

const SPLIT_EXACT_LEVELS: usize = 6;
const SPLIT_EXACT_DIGITS: u64 = 20_000;

fn digits(n: &BigInt, d: &BigInt) -> u64 {
    let bits = n.bits().max(d.bits());
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

fn normalized_float(n: &BigInt, d: &BigInt) -> (f64, f64) {
    let bits = n.bits().max(d.bits());
    let shift = bits.saturating_sub(60);
    let u = (n >> shift).to_f64().unwrap_or(0.0);
    let v = (d >> shift).to_f64().unwrap_or(0.0);
    let m = u.abs().max(v.abs());
    (u / m, v / m)
}

impl<'a> Iteration<'a> {
    fn step(&mut self) -> Result<Step> {
        let switch = match (&self.state, self.exact_prefix) {
            (State::Exact { n, d, .. }, Some(k)) => self.level >= k || digits(n, d) > SPLIT_EXACT_DIGITS,
            _ => false,
        };
        if switch {
            self.switch_to_split();
        }
        let level = self.level;
        let out = match &mut self.state {
            State::Exact { n, d, seen } => {
                let dg = digits(n, d);
                if dg > self.budget {
                    return Err(HeightError::BudgetExceeded {
                        level,
                        digits: dg,
                        budget: self.budget,
                    });
                }
                let (f, g) = self.forms.eval_exact(n, d);
                if g.is_zero() {
                    return Ok(Step::Torsion);
                }
                let h_old = big_ln(&n.abs().max(d.abs()));
                let c = f.gcd(&g);
                let (mut nn, mut dd) = (f / &c, g / &c);
                if dd.is_negative() {
                    nn = -nn;
                    dd = -dd;
                }
                let h_new = big_ln(&nn.abs().max(dd.abs()));
                if !seen.insert((nn.clone(), dd.clone())) {
                    return Ok(Step::Torsion);
                }
                *n = nn;
                *d = dd;
                Step::Defect(h_new - 4.0 * h_old)
            }
            State::Split { u, v, rn, rd, modulus } => {
                let (fu, gv) = self.forms.eval_float(*u, *v);
                let m = fu.abs().max(gv.abs());
                if !(m > 0.0) || !m.is_finite() {
                    return Err(HeightError::NoConvergence { levels: level });
                }
                let phi = m.ln();
                *u = fu / m;
                *v = gv / m;
                let res = self.forms.resultant.abs();
                let ln_g = if res.is_one() {
                    0.0
                } else {
                    let (f, g) = self.forms.eval_exact(rn, rd);
                    let f = f.mod_floor(modulus);
                    let g = g.mod_floor(modulus);
                    let c = f.mod_floor(&res).gcd(&g.mod_floor(&res)).gcd(&res);
                    *modulus = &*modulus / &c;
                    *rn = (f / &c).mod_floor(modulus);
                    *rd = (g / &c).mod_floor(modulus);
                    if !(&*modulus % &res).is_zero() {
                        return Err(HeightError::NoConvergence { levels: level });
                    }
                    big_ln(&c)
                };
                Step::Defect(phi - ln_g)
            }
        };
        self.level += 1;
        Ok(out)
    }

    fn switch_to_split(&mut self) {
        if let State::Exact { n, d, .. } = &self.state {
            let (u, v) = normalized_float(n, d);
            let res = self.forms.resultant.abs();
            let modulus = if res.is_one() {
                BigInt::one()
            } else {
                num_traits::pow(res, self.modulus_exponent as usize)
            };
            let (rn, rd) = (n.mod_floor(&modulus), d.mod_floor(&modulus));
            self.state = State::Split { u, v, rn, rd, modulus };
        }
    }
}

/// Canonical height of `P` with respect to the `x`-coordinate map.
pub fn tate_limit_height(
    curve: &WeierstrassCurve<BigRational>,
    p: &CurvePoint<BigRational>,
    opts: &TateOptions,
) -> Result<HeightReport> {
    if !(opts.tol > 0.0) {
        return Err(HeightError::InvalidArgument(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    if !curve.contains(p) {
        return Err(HeightError::NotOnCurve);
    }
    let forms = DuplicationForms::new(curve)?;
    let c_def = forms.defect_bound();
    let x = match p {
        CurvePoint::Infinity => return Ok(HeightReport::torsion(0.0, opts.base_height, opts, vec![0.0], c_def)),
        CurvePoint::Affine { x, .. } => x,
    };
    let naive = rational_height(x);
    let (n, d) = (x.numer().clone(), x.denom().clone());
    let mut seen = HashSet::new();
    seen.insert((n.clone(), d.clone()));
    let mut it = Iteration {
        forms: &forms,
        state: State::Exact { n, d, seen },
        level: 0,
        exact_prefix: match opts.engine {
            HeightEngine::Exact => None,
            HeightEngine::Split => Some(SPLIT_EXACT_LEVELS),
        },
        modulus_exponent: opts.max_levels as u32 + 4,
        budget: opts.digit_budget,
    };

    let mut seq = vec![naive];
    let certified = |l: usize| c_def / (3.0 * 4f64.powi(l as i32));
    let stop_level = loop {
        let l = seq.len() - 1;
        let done = l >= opts.min_levels
            && match opts.stop_rule {
                StopRule::Certified => certified(l) <= opts.tol,
                StopRule::GeometricTail => l >= 1 && (seq[l] - seq[l - 1]).abs() < 0.75 * opts.tol,
            };
        if done {
            break l;
        }
        if l >= opts.max_levels {
            return Err(HeightError::NoConvergence { levels: l });
        }
        match it.step()? {
            Step::Torsion => return Ok(HeightReport::torsion(naive, opts.base_height, opts, seq, c_def)),
            Step::Defect(delta) => seq.push(seq[l] + delta / 4f64.powi(l as i32 + 1)),
        }
    };

    let last_diff = if stop_level >= 1 {
        (seq[stop_level] - seq[stop_level - 1]).abs()
    } else {
        0.0
    };
    let tail_estimate = 4.0 / 3.0 * last_diff;
    let error_estimate = match opts.stop_rule {
        StopRule::Certified => certified(stop_level),
        StopRule::GeometricTail => tail_estimate,
    };

    if opts.paranoia {
        for _ in 0..2 {
            let l = seq.len() - 1;
            match it.step()? {
                Step::Torsion => return Ok(HeightReport::torsion(naive, opts.base_height, opts, seq, c_def)),
                Step::Defect(delta) => seq.push(seq[l] + delta / 4f64.powi(l as i32 + 1)),
            }
        }
        let moved = (seq[stop_level + 2] - seq[stop_level]).abs();
        if moved > error_estimate * (1.0 + 1e-9) + 1e-15 {
            return Err(HeightError::ParanoiaFailed {
                moved,
                estimate: error_estimate,
            });
        }
        seq.truncate(stop_level + 1);
    }

    Ok(HeightReport {
        naive,
        canonical: seq[stop_level],
        error_estimate,
        iterations: stop_level,
        base_height: opts.base_height,
        torsion: false,
        divisor: X_DIVISOR,
        engine: opts.engine,
        stop_rule: opts.stop_rule,
        sequence: seq,
        tail_estimate,
        defect_bound: c_def,
    })
}

/// `(|h(x(2P)) - 4 h(x(P))|, defect / max(1, base_height))`.
pub fn duplication_defect(
    curve: &WeierstrassCurve<BigRational>,
    p: &CurvePoint<BigRational>,
    base_height: f64,
) -> Result<(f64, f64)> {
    let x = match p {
        CurvePoint::Infinity => return Err(HeightError::TwoTorsion),
        CurvePoint::Affine { x, .. } => x,
    };
    if !curve.contains(p) {
        return Err(HeightError::NotOnCurve);
    }
    let x2 = x_duplication(curve, x)?;
    let defect = (rational_height(&x2) - 4.0 * rational_height(x)).abs();
    Ok((defect, defect / base_height.max(1.0)))
}

/// `(h(P + Q) - h(P) - h(Q)) / 2` with the canonical height of
/// [`tate_limit_height`], and the propagated error.
pub fn neron_tate_pairing(
    curve: &WeierstrassCurve<BigRational>,
    p: &CurvePoint<BigRational>,
    q: &CurvePoint<BigRational>,
    opts: &TateOptions,
) -> Result<(f64, f64)> {
    let s = tate_limit_height(curve, &curve.add(p, q), opts)?;
    let a = tate_limit_height(curve, p, opts)?;
    let b = tate_limit_height(curve, q, opts)?;
    Ok((
        (s.canonical - a.canonical - b.canonical) / 2.0,
        (s.error_estimate + a.error_estimate + b.error_estimate) / 2.0,
    ))
}
