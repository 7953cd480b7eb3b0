use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use bh_core::counting::MultiPoly;
use bh_core::elliptic::{CurvePoint, WeierstrassCurve};

use crate::report::{CliError, CliResult};

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Position of the sign separating real and imaginary parts, skipping a
/// leading sign and exponent signs.
fn split_sign(s: &str) -> Option<usize> {
    let b = s.as_bytes();
    (1..b.len())
        .rev()
        .find(|&i| (b[i] == b'+' || b[i] == b'-') && !matches!(b[i - 1], b'e' | b'E'))
}

fn parse_f64(s: &str, whole: &str) -> CliResult<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| invalid(format!("bad number {s:?} in {whole:?}")))?;
    if !v.is_finite() {
        return Err(invalid(format!("non-finite number in {whole:?}")));
    }
    Ok(v)
}

fn parse_imag(s: &str, whole: &str) -> CliResult<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => parse_f64(s, whole),
    }
}

/// Complex literal `a+bi` with optional signs and no spaces: `1`, `-i`,
/// `2.5i`, `0.5-1e-3i`.
pub fn complex(s: &str) -> CliResult<Complex64> {
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(invalid(format!("bad complex literal {s:?}")));
    }
    match s.strip_suffix('i') {
        None => Ok(Complex64::new(parse_f64(s, s)?, 0.0)),
        Some(body) => match split_sign(body) {
            Some(k) => Ok(Complex64::new(parse_f64(&body[..k], s)?, parse_imag(&body[k..], s)?)),
            None => Ok(Complex64::new(0.0, parse_imag(body, s)?)),
        },
    }
}

pub fn complex_list(s: &str) -> CliResult<Vec<Complex64>> {
    s.split(',').map(complex).collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn complex_matrix(s: &str) -> CliResult<DMatrix<Complex64>> {
    let rows: Vec<Vec<Complex64>> = s.split(';').map(complex_list).collect::<CliResult<_>>()?;
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("ragged matrix {s:?}")));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
}

pub fn real_matrix(s: &str) -> CliResult<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|x| parse_f64(x.trim(), s))
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<_>>()?;
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("ragged matrix {s:?}")));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
}

pub fn complex_vector(s: &str) -> CliResult<DVector<Complex64>> {
    Ok(DVector::from_vec(complex_list(s)?))
}

pub fn integer(s: &str) -> CliResult<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| invalid(format!("bad integer {s:?}")))
}

/// Exact rational from `n`, `n/d` or a decimal `x.y`.
pub fn rational(s: &str) -> CliResult<BigRational> {
    let s = s.trim();
    let bad = || invalid(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let d = integer(d).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(integer(n).map_err(|_| bad())?, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{frac}", if int_digits.is_empty() { "0" } else { int_digits });
        let mut n = integer(&digits).map_err(|_| bad())?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(n, d));
    }
    Ok(BigRational::from_integer(integer(s).map_err(|_| bad())?))
}

pub fn rational_list(s: &str, sep: char) -> CliResult<Vec<BigRational>> {
    s.split(sep).map(rational).collect()
}

pub fn u64_list(s: &str) -> CliResult<Vec<u64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| invalid(format!("bad integer {x:?} in {s:?}")))
        })
        .collect()
}

pub fn i64_list(s: &str) -> CliResult<Vec<i64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| invalid(format!("bad integer {x:?} in {s:?}")))
        })
        .collect()
}

/// `key=value` pairs separated by `sep`.
pub fn key_values(s: &str, sep: char) -> CliResult<Vec<(String, String)>> {
    s.split(sep)
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got {p:?}")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// `A=..,B=..` for `y^2 = x^3 + A x + B`, or `a2=..,a4=..,a6=..`.
pub fn curve(s: &str) -> CliResult<WeierstrassCurve<BigRational>> {
    let mut coeffs: BTreeMap<&str, BigRational> = BTreeMap::new();
    for (k, v) in key_values(s, ',')? {
        let key = match k.as_str() {
            "A" | "a4" => "a4",
            "B" | "a6" => "a6",
            "a2" => "a2",
            other => return Err(invalid(format!("unknown curve coefficient {other:?}"))),
        };
        if coeffs.insert(key, rational(&v)?).is_some() {
            return Err(invalid(format!("coefficient {key} given twice in {s:?}")));
        }
    }
    let get = |k: &str| coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
    Ok(WeierstrassCurve::new(get("a2"), get("a4"), get("a6"))?)
}

/// `x,y` or `O` for the point at infinity.
pub fn point(s: &str) -> CliResult<CurvePoint<BigRational>> {
    if matches!(s.trim(), "O" | "inf") {
        return Ok(CurvePoint::Infinity);
    }
    let v = rational_list(s, ',')?;
    if v.len() != 2 {
        return Err(invalid(format!("a point needs two coordinates, got {s:?}")));
    }
    Ok(CurvePoint::Affine {
        x: v[0].clone(),
        y: v[1].clone(),
    })
}

/// Points separated by `;`.
pub fn points(s: &str) -> CliResult<Vec<CurvePoint<BigRational>>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(point).collect()
}

/// Projective points with rational coordinates separated by `;`.
pub fn projective_points(s: &str) -> CliResult<Vec<Vec<BigRational>>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| rational_list(p, ','))
        .collect()
}

/// Polynomial on `(P^n)^M` in the variables `x<k>_<j>` (factor `k`,
/// coordinate `j`), e.g. `x0_1^2 - 3/2*x0_0*x1_1`.
pub fn polynomial(s: &str, n: usize, m: usize) -> CliResult<MultiPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(invalid("empty polynomial"));
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    let b = compact.as_bytes();
    for i in 1..b.len() {
        if (b[i] == b'+' || b[i] == b'-') && b[i - 1] != b'*' && b[i - 1] != b'^' {
            pieces.push(&compact[start..i]);
            start = i;
        }
    }
    pieces.push(&compact[start..]);
    let mut terms = Vec::new();
    for piece in pieces {
        let (sign, body) = match piece.as_bytes()[0] {
            b'-' => (-1, &piece[1..]),
            b'+' => (1, &piece[1..]),
            _ => (1, piece),
        };
        let mut coeff = BigRational::from_integer(sign.into());
        let mut exps = vec![vec![0u32; n + 1]; m];
        for factor in body.split('*') {
            if let Some(var) = factor.strip_prefix('x') {
                let (name, pow) = match var.split_once('^') {
                    Some((name, e)) => (
                        name,
                        e.parse::<u32>()
                            .map_err(|_| invalid(format!("bad exponent in {factor:?}")))?,
                    ),
                    None => (var, 1),
                };
                let (k, j) = name
                    .split_once('_')
                    .ok_or_else(|| invalid(format!("variables look like x<k>_<j>, got {factor:?}")))?;
                let k: usize = k
                    .parse()
                    .map_err(|_| invalid(format!("bad factor index in {factor:?}")))?;
                let j: usize = j
                    .parse()
                    .map_err(|_| invalid(format!("bad coordinate index in {factor:?}")))?;
                if k >= m || j > n {
                    return Err(invalid(format!("variable {factor:?} outside (P^{n})^{m}")));
                }
                exps[k][j] += pow;
            } else {
                coeff *= rational(factor)?;
            }
        }
        terms.push((coeff, exps));
    }
    let poly = MultiPoly::new(n, m, terms)?;
    if poly.is_zero() {
        return Err(invalid(format!("{s:?} is the zero polynomial")));
    }
    Ok(poly)
}

/// Splits a `key = value` config file into long-flag arguments. `true`
/// becomes a bare flag and `false` is dropped.
pub fn config_args(text: &str) -> CliResult<Vec<(String, Option<String>)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected key = value", no + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'-' || c == b'_') {
            return Err(invalid(format!("config line {}: bad key {k:?}", no + 1)));
        }
        if matches!(k, "config") {
            return Err(invalid("config files cannot include other config files"));
        }
        match v {
            "true" => out.push((k.to_string(), None)),
            "false" => {}
            _ => out.push((k.to_string(), Some(v.to_string()))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(complex("0.5+0.5i").unwrap(), Complex64::new(0.5, 0.5));
        assert_eq!(complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(complex("+2.5i").unwrap(), Complex64::new(0.0, 2.5));
        assert_eq!(complex("-1-i").unwrap(), Complex64::new(-1.0, -1.0));
        assert_eq!(complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert_eq!(complex("0.3").unwrap(), Complex64::new(0.3, 0.0));
        assert!(complex("1 + i").is_err());
        assert!(complex("1+ij").is_err());
        assert!(complex("").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(rational("-3/2").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert_eq!(rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(rational("-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(rational("1/0").is_err());
        assert!(rational("1.").is_err());
    }

    #[test]
    fn curves_and_points() {
        let e = curve("A=0,B=-2").unwrap();
        assert!(e.contains(&point("3,5").unwrap()));
        assert!(curve("A=0,C=1").is_err());
        assert!(curve("A=0,B=0").is_err());
        assert_eq!(points("3,5;O").unwrap().len(), 2);
    }

    #[test]
    fn polynomials() {
        let f = polynomial("x0_1^2 - 3/2*x0_0*x0_1", 1, 1).unwrap();
        assert_eq!(f.multidegree(), Some(vec![2]));
        let g = polynomial("x0_1*x1_0 - x0_0*x1_1", 1, 2).unwrap();
        assert_eq!(g.multidegree(), Some(vec![1, 1]));
        assert!(polynomial("x0_1 + x0_0^2", 1, 1).is_err());
        assert!(polynomial("x2_0", 1, 2).is_err());
        assert!(polynomial("x0_1 - x0_1", 1, 1).is_err());
    }

    #[test]
    fn config_lines() {
        let args = config_args("# c\nlambda = 0.3\nno-halving = true\nscaling = false\n").unwrap();
        assert_eq!(
            args,
            vec![("lambda".into(), Some("0.3".into())), ("no-halving".into(), None)]
        );
        assert!(config_args("oops").is_err());
        assert!(config_args("config = x").is_err());
    }
}
