use std::collections::BTreeMap;

use clap::{Args, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use bh_core::intersection::{
    admissible_c1, graph_degree_recurrence, mf_upper_bound, siu_bigness_check_rational, MultiClass, MultiProjSpace,
};

use crate::parse;
use crate::report::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct SiuArgs {
    /// Top self-intersection `(F^d)`.
    #[arg(long = "Fd")]
    pub fd: Option<String>,
    /// Mixed intersection `(M . F^(d-1))`.
    #[arg(long = "MF")]
    pub mf: Option<String>,
    #[arg(long)]
    pub d: u32,
    #[arg(long = "N", default_value_t = 1)]
    pub n: u64,
    #[arg(long)]
    pub c1: Option<String>,
    /// With `--c`, derive `c1 = kappa / (2 c d)` and check it at `(F^d) = kappa`, `N^2 (M . F^(d-1)) = c`.
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
}

fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

pub fn run_siu(args: &SiuArgs) -> CliResult<Value> {
    let mut out = serde_json::Map::new();
    if let (Some(fd), Some(mf), Some(c1)) = (&args.fd, &args.mf, &args.c1) {
        let (fd, mf, c1) = (parse::rational(fd)?, parse::rational(mf)?, parse::rational(c1)?);
        let big = siu_bigness_check_rational(&fd, &mf, args.d, &c1, args.n);
        let nn = BigRational::from_integer(BigInt::from(args.n) * BigInt::from(args.n));
        let rhs = BigRational::from_integer(args.d.into()) * &c1 * nn * &mf;
        out.insert(
            "check".into(),
            json!({ "big": big, "lhs": rational_string(&fd), "rhs": rational_string(&rhs), "c1": rational_string(&c1) }),
        );
    }
    if let (Some(kappa), Some(c)) = (&args.kappa, &args.c) {
        let (kappa, c) = (parse::rational(kappa)?, parse::rational(c)?);
        let chosen = admissible_c1(&kappa, &c, args.d)?;
        let edge = &chosen * BigRational::from_integer(2.into());
        let passes = siu_bigness_check_rational(&kappa, &c, args.d, &chosen, 1);
        let edge_passes = siu_bigness_check_rational(&kappa, &c, args.d, &edge, 1);
        out.insert(
            "admissible".into(),
            json!({
                "c1": rational_string(&chosen),
                "passes": passes,
                "boundary_c1": rational_string(&edge),
                "boundary_passes": edge_passes,
            }),
        );
    }
    if out.is_empty() {
        return Err(CliError::Validation(
            "give --Fd, --MF and --c1, or --kappa and --c".into(),
        ));
    }
    Ok(Value::Object(out))
}

#[derive(Subcommand, Debug)]
pub enum IntersectCommand {
    /// Intersection number of a product of line bundles.
    Number(NumberArgs),
    /// Degrees `(D_l, D'_l)` of the iterated graph construction.
    Recurrence(RecurrenceArgs),
    /// Exact multinomial sum and its simplified upper bound.
    Mf(MfArgs),
}

#[derive(Args, Debug)]
pub struct NumberArgs {
    /// Factor dimensions `n_1,...,n_r`.
    #[arg(long)]
    pub dims: String,
    /// Multidegrees of the line bundles, separated by `;`.
    #[arg(long)]
    pub bundles: String,
}

#[derive(Args, Debug)]
pub struct RecurrenceArgs {
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub dprime: String,
}

#[derive(Args, Debug)]
pub struct MfArgs {
    #[arg(long)]
    pub d: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub dprime: String,
    /// Coefficients `a_{ip}` as `i,p=value` separated by `;`.
    #[arg(long)]
    pub a: String,
}

pub fn run_intersect(cmd: &IntersectCommand) -> CliResult<Value> {
    match cmd {
        IntersectCommand::Number(a) => {
            let dims: Vec<u32> = parse::u64_list(&a.dims)?
                .into_iter()
                .map(|x| u32::try_from(x).map_err(|_| CliError::Validation(format!("dimension {x} is too large"))))
                .collect::<CliResult<_>>()?;
            let space = MultiProjSpace::new(dims)?;
            let mut class = MultiClass::one(&space);
            let mut count = 0;
            for b in a.bundles.split(';').filter(|s| !s.trim().is_empty()) {
                class = class.mul(&MultiClass::line_bundle(&space, &parse::i64_list(b)?)?)?;
                count += 1;
            }
            Ok(json!({
                "dimension": space.dimension(),
                "bundles": count,
                "class": class.to_string(),
                "intersection_number": class.intersection_number().to_string(),
            }))
        }
        IntersectCommand::Recurrence(a) => {
            let (d, dp) = graph_degree_recurrence(a.l, &parse::integer(&a.dprime)?)?;
            Ok(json!({ "l": a.l, "d_l": d.to_string(), "dprime_l": dp.to_string() }))
        }
        IntersectCommand::Mf(a) => {
            let mut coeffs = BTreeMap::new();
            for (k, v) in parse::key_values(&a.a, ';')? {
                let idx = parse::u64_list(&k)?;
                if idx.len() != 2 {
                    return Err(CliError::Validation(format!("index {k:?} needs two entries")));
                }
                let (i, p) = (idx[0] as u32, idx[1] as u32);
                coeffs.insert((i, p), parse::integer(&v)?);
            }
            let r = mf_upper_bound(a.d, a.n, a.m, a.l, &parse::integer(&a.dprime)?, &coeffs)?;
            Ok(json!({
                "exact_sum": r.exact_sum.to_string(),
                "simplified": r.simplified.to_string(),
                "holds": r.exact_sum <= r.simplified,
            }))
        }
    }
}
