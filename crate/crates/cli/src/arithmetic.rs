use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use bh_core::elliptic::LegendreSection;
use bh_core::heights::{
    assemble_constants_map, legendre_scan_grid, silverman_tate_scan, tate_limit_height, HeightEngine, StopRule,
    TateOptions,
};

use crate::parse;
use crate::report::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StopArg {
    Certified,
    Geometric,
}

#[derive(Args, Debug)]
pub struct HeightArgs {
    /// `A=..,B=..` for `y^2 = x^3 + A x + B`, or `a2=..,a4=..,a6=..`.
    #[arg(long)]
    pub curve: String,
    /// Point `x,y` with rational coordinates, or `O`.
    #[arg(long = "P")]
    pub p: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "split")]
    pub engine: EngineArg,
    #[arg(long, value_enum, default_value = "certified")]
    pub stop: StopArg,
    /// Run two extra levels and check the error estimate held.
    #[arg(long)]
    pub paranoia: bool,
    #[arg(long = "digit-budget", default_value_t = 200_000)]
    pub digit_budget: u64,
    #[arg(long = "max-levels", default_value_t = 60)]
    pub max_levels: usize,
    /// Height of the base point, echoed into the report.
    #[arg(long = "base-height", default_value_t = 0.0)]
    pub base_height: f64,
}

fn tate_options(tol: f64, engine: EngineArg, stop: StopArg) -> TateOptions {
    TateOptions {
        tol,
        engine: match engine {
            EngineArg::Exact => HeightEngine::Exact,
            EngineArg::Split => HeightEngine::Split,
        },
        stop_rule: match stop {
            StopArg::Certified => StopRule::Certified,
            StopArg::Geometric => StopRule::GeometricTail,
        },
        ..TateOptions::default()
    }
}

pub fn run_height(args: &HeightArgs) -> CliResult<Value> {
    let curve = parse::curve(&args.curve)?;
    let p = parse::point(&args.p)?;
    let opts = TateOptions {
        paranoia: args.paranoia,
        digit_budget: args.digit_budget,
        max_levels: args.max_levels,
        base_height: args.base_height,
        ..tate_options(args.tol, args.engine, args.stop)
    };
    let r = tate_limit_height(&curve, &p, &opts)?;
    let (half, half_err) = r.rescaled(0.5);
    Ok(json!({
        "height": r,
        "differences": r.differences(),
        "origin_divisor": { "canonical": half, "error_estimate": half_err },
    }))
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Number of rational `lambda` in the grid.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    /// Comma-separated section names (default all built-in sections).
    #[arg(long)]
    pub sections: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "split")]
    pub engine: EngineArg,
    /// Leave out the per-sample series.
    #[arg(long = "summary-only")]
    pub summary_only: bool,
}

pub fn run_scan(args: &ScanArgs) -> CliResult<Value> {
    if args.count < 2 {
        return Err(CliError::Validation("count must be at least 2".into()));
    }
    let sections: Vec<LegendreSection> = match &args.sections {
        Some(s) => s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?,
        None => LegendreSection::ALL.to_vec(),
    };
    let grid = legendre_scan_grid(args.count);
    let opts = tate_options(args.tol, args.engine, StopArg::Certified);
    let r = silverman_tate_scan(&grid, &sections, &opts);
    if r.samples.is_empty() {
        return Err(CliError::Numeric("every sample failed".into()));
    }
    let mut v = serde_json::to_value(&r).expect("scan report is serializable");
    let obj = v.as_object_mut().expect("scan report is an object");
    obj.insert("grid_size".into(), json!(grid.len()));
    obj.insert(
        "sections".into(),
        json!(sections.iter().map(|s| s.name()).collect::<Vec<_>>()),
    );
    if args.summary_only {
        obj.remove("samples");
    }
    Ok(v)
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub c0: f64,
    #[arg(long)]
    pub c1: f64,
    /// Values of `c2(N)` as `N=value` pairs separated by commas.
    #[arg(long)]
    pub c2: String,
}

pub fn run_constants(args: &ConstantsArgs) -> CliResult<Value> {
    let mut c2 = BTreeMap::new();
    for (k, v) in parse::key_values(&args.c2, ',')? {
        let n: u64 = k.parse().map_err(|_| CliError::Validation(format!("bad N {k:?}")))?;
        let x: f64 = v
            .parse()
            .map_err(|_| CliError::Validation(format!("bad c2 value {v:?}")))?;
        c2.insert(n, x);
    }
    let a = assemble_constants_map(args.c0, args.c1, &c2)?;
    Ok(serde_json::to_value(a).expect("constants are serializable"))
}
