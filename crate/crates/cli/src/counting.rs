use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use bh_core::counting::{
    alon_bound, alon_grid, alon_test, covering_bound, dichotomy_scan, greedy_cover, hurwitz_packet_bound, nt_distance,
    nt_norm, split_small_large, vojta_large_bound, MWLattice, PointBudget, DEFAULT_TUPLE_BUDGET,
};
use bh_core::elliptic::CurvePoint;
use bh_core::heights::TateOptions;

use crate::parse;
use crate::report::{CliError, CliResult};

#[derive(Subcommand, Debug)]
pub enum CountCommand {
    /// Greedy cover of points in a Mordell-Weil lattice ball.
    Cover(CoverArgs),
    /// Small/large split of points by height.
    Split(SplitArgs),
    /// `c^rho` and `c^(1 + rho)`.
    Vojta(VojtaArgs),
    /// `84 (g - 1)`.
    Hurwitz(HurwitzArgs),
    /// Small-difference count around a point on an elliptic fiber.
    Dichotomy(DichotomyArgs),
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[arg(long)]
    pub rho: u32,
    #[arg(long = "R")]
    pub big_r: f64,
    #[arg(long)]
    pub r: f64,
    /// CSV file of lattice coordinates, one point per row, no header.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Gram matrix, rows separated by `;` (default identity).
    #[arg(long)]
    pub gram: Option<String>,
    /// Number of seeded random points in the `R`-ball when no file is given.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// CSV file of `id,height` rows, no header.
    #[arg(long)]
    pub heights: Option<PathBuf>,
    /// Inline `id=height` pairs separated by commas.
    #[arg(long)]
    pub inline: Option<String>,
    /// Threshold `B`; otherwise `c0 * max(1, h)`.
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VojtaArgs {
    #[arg(long, default_value_t = 7.0)]
    pub c: f64,
    #[arg(long)]
    pub rho: u32,
}

#[derive(Args, Debug)]
pub struct HurwitzArgs {
    #[arg(long)]
    pub g: u64,
}

#[derive(Args, Debug)]
pub struct DichotomyArgs {
    #[arg(long)]
    pub curve: String,
    #[arg(long = "P")]
    pub p: String,
    /// Candidate points `x,y` separated by `;`.
    #[arg(long)]
    pub candidates: Option<String>,
    /// Also enumerate `j P` for `|j| <= K`.
    #[arg(long)]
    pub multiples: Option<u32>,
    #[arg(long)]
    pub c3: f64,
    /// Omit for an unbounded `c4`.
    #[arg(long)]
    pub c4: Option<u64>,
    #[arg(long = "h-base")]
    pub h_base: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_rows(path: &Path) -> CliResult<Vec<csv::StringRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| io_error(path, e))?;
    rdr.records().collect::<Result<_, _>>().map_err(|e| io_error(path, e))
}

fn sample_ball(lat: &MWLattice, big_r: f64, count: usize, rng: &mut ChaCha8Rng) -> CliResult<Vec<Vec<f64>>> {
    let rho = lat.rank();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: Vec<f64> = (0..rho).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = nt_norm(lat, &u)?;
        if n > 1.0 {
            continue;
        }
        out.push(u.iter().map(|x| x * big_r).collect());
    }
    Ok(out)
}

fn run_cover(args: &CoverArgs, seed: u64) -> CliResult<Value> {
    let rho = args.rho as usize;
    let lat = match &args.gram {
        Some(s) => MWLattice::new(parse::real_matrix(s)?)?,
        None => MWLattice::identity(rho),
    };
    if lat.rank() != rho {
        return Err(CliError::Validation(format!(
            "Gram matrix has rank {}, expected rho = {rho}",
            lat.rank()
        )));
    }
    let bound = covering_bound(args.big_r, args.r, args.rho)?;
    let (points, source) = match &args.points {
        Some(path) => {
            let rows = read_rows(path)?;
            let pts: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|x| {
                            x.parse::<f64>()
                                .map_err(|_| CliError::Validation(format!("bad coordinate {x:?}")))
                        })
                        .collect()
                })
                .collect::<CliResult<_>>()?;
            (pts, "file")
        }
        None => {
            if rho == 0 {
                (vec![Vec::new(); args.samples.min(1)], "seeded_random")
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (sample_ball(&lat, args.big_r, args.samples, &mut rng)?, "seeded_random")
            }
        }
    };
    let mut max_norm: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        let n = nt_norm(&lat, p)?;
        if n > args.big_r {
            return Err(CliError::Validation(format!(
                "point {i} has norm {n} > R = {}",
                args.big_r
            )));
        }
        max_norm = max_norm.max(n);
    }
    let centers = greedy_cover(&points, &lat, args.r)?;
    let mut max_gap: f64 = 0.0;
    for p in &points {
        let mut best = f64::INFINITY;
        for &c in &centers {
            best = best.min(nt_distance(&lat, p, &points[c])?);
        }
        max_gap = max_gap.max(best);
    }
    Ok(json!({
        "points": points.len(),
        "source": source,
        "max_norm": max_norm,
        "centers": centers,
        "count": centers.len(),
        "bound": bound,
        "within_bound": (centers.len() as f64) <= bound,
        "max_distance_to_center": if points.is_empty() { 0.0 } else { max_gap },
        "sound": points.is_empty() || max_gap <= args.r,
    }))
}

fn run_split(args: &SplitArgs) -> CliResult<Value> {
    let mut items: Vec<(String, f64)> = Vec::new();
    if let Some(path) = &args.heights {
        for row in read_rows(path)? {
            if row.len() != 2 {
                return Err(CliError::Validation(format!(
                    "expected id,height rows in {}",
                    path.display()
                )));
            }
            let h = row[1]
                .parse()
                .map_err(|_| CliError::Validation(format!("bad height {:?}", &row[1])))?;
            items.push((row[0].to_string(), h));
        }
    }
    if let Some(s) = &args.inline {
        for (k, v) in parse::key_values(s, ',')? {
            let h = v
                .parse()
                .map_err(|_| CliError::Validation(format!("bad height {v:?}")))?;
            items.push((k, h));
        }
    }
    let b = match (args.b, args.c0, args.h) {
        (Some(b), None, None) => b,
        (None, Some(c0), Some(h)) => PointBudget::from_base_height(c0, h, 1.0)?.small_threshold,
        _ => return Err(CliError::Validation("give either --B or both --c0 and --h".into())),
    };
    let part = split_small_large(&items, b)?;
    Ok(json!({
        "threshold": b,
        "small": part.small,
        "large": part.large,
        "small_count": part.small.len(),
        "large_count": part.large.len(),
    }))
}

fn run_dichotomy(args: &DichotomyArgs) -> CliResult<Value> {
    let curve = parse::curve(&args.curve)?;
    let p = parse::point(&args.p)?;
    if !curve.contains(&p) {
        return Err(CliError::Validation("P is not on the curve".into()));
    }
    let mut cands: Vec<(String, CurvePoint<_>)> = Vec::new();
    if let Some(s) = &args.candidates {
        for (i, q) in parse::points(s)?.into_iter().enumerate() {
            cands.push((format!("Q{i}"), q));
        }
    }
    if let Some(k) = args.multiples {
        for j in -(k as i64)..=(k as i64) {
            cands.push((format!("{j}P"), curve.mul(j, &p)));
        }
    }
    let opts = TateOptions::with_tol(args.tol);
    let r = dichotomy_scan(&curve, &cands, &p, args.c3, args.c4, args.h_base, &opts)?;
    let mut v = serde_json::to_value(&r).expect("dichotomy report is serializable");
    v.as_object_mut()
        .expect("report is an object")
        .insert("c4".into(), args.c4.map(|c| json!(c)).unwrap_or(json!("infinity")));
    Ok(v)
}

pub fn run_count(cmd: &CountCommand, seed: u64) -> CliResult<Value> {
    match cmd {
        CountCommand::Cover(a) => run_cover(a, seed),
        CountCommand::Split(a) => run_split(a),
        CountCommand::Vojta(a) => {
            let (small, total) = vojta_large_bound(a.c, a.rho)?;
            Ok(json!({ "c": a.c, "rho": a.rho, "large_per_class": small, "large_total": total }))
        }
        CountCommand::Hurwitz(a) => Ok(json!({ "g": a.g, "bound": hurwitz_packet_bound(a.g)? })),
        CountCommand::Dichotomy(a) => run_dichotomy(a),
    }
}

#[derive(Subcommand, Debug)]
pub enum AlonCommand {
    /// Size of `Sigma` forcing `Sigma^M` out of `Z`.
    Bound(AlonBoundArgs),
    /// Whether `Sigma^M` leaves the zero set of a polynomial system.
    Test(AlonTestArgs),
    /// Exhaustive cross-check of the bound against the test on lines and conics.
    Grid(AlonGridArgs),
}

#[derive(Args, Debug)]
pub struct AlonBoundArgs {
    #[arg(long = "M")]
    pub m: u32,
    #[arg(long = "degC")]
    pub deg_c: u32,
    #[arg(long = "degZ")]
    pub deg_z: u32,
}

#[derive(Args, Debug)]
pub struct AlonTestArgs {
    /// Ambient dimension `n` of each `P^n` factor.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long = "M")]
    pub m: usize,
    /// Projective points with rational coordinates, separated by `;`.
    #[arg(long)]
    pub points: String,
    /// Polynomial in `x<k>_<j>`; repeat for a system.
    #[arg(long = "poly")]
    pub polys: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct AlonGridArgs {
    #[arg(long = "max-M", default_value_t = 3)]
    pub max_m: u32,
    #[arg(long, default_value_t = 100_000_000)]
    pub budget: u64,
}

pub fn run_alon(cmd: &AlonCommand) -> CliResult<Value> {
    match cmd {
        AlonCommand::Bound(a) => Ok(json!({ "bound": alon_bound(a.m, a.deg_c, a.deg_z)?.to_string() })),
        AlonCommand::Test(a) => {
            let sigma = parse::projective_points(&a.points)?;
            let z = a
                .polys
                .iter()
                .map(|s| parse::polynomial(s, a.n, a.m))
                .collect::<CliResult<Vec<_>>>()?;
            let outside = alon_test(&sigma, &z, a.m, a.budget)?;
            Ok(json!({
                "points": sigma.len(),
                "polynomials": z.len(),
                "tuples": (sigma.len() as u128).pow(a.m as u32).to_string(),
                "not_contained": outside,
            }))
        }
        AlonCommand::Grid(a) => {
            if a.max_m > 3 {
                return Err(CliError::Validation("the grid is defined for M <= 3".into()));
            }
            let r = alon_grid(a.max_m, a.budget)?;
            Ok(serde_json::to_value(r).expect("grid report is serializable"))
        }
    }
}
