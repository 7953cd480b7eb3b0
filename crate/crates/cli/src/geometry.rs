use clap::Args;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use bh_core::elliptic::{LegendreChart, LegendreSection};
use bh_core::siegel::{
    betti_coordinates, betti_form, betti_form_flat_polarized, betti_form_hermitian, betti_to_fiber,
    hermitian_eigen_range, hermitian_gram, kernel_directions, numerical_betti_rank, pullback_scaling, tangent_to_real,
    BettiCoords, PolarizationType, RankOptions, SiegelPoint, TangentVector,
};

use crate::parse;
use crate::report::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct BettiArgs {
    /// Genus.
    #[arg(long, default_value_t = 1)]
    pub g: usize,
    /// Period matrix, rows separated by `;` (default `i * I`).
    #[arg(long = "Z")]
    pub z: Option<String>,
    /// Fiber point, comma-separated complex entries (default `0.5+0.5i` each).
    #[arg(long)]
    pub w: Option<String>,
    /// Polarization type `d_1,...,d_g` (default principal).
    #[arg(long = "D")]
    pub d: Option<String>,
    /// Fiber part of the first tangent vector (default seeded random).
    #[arg(long = "xi-w")]
    pub xi_w: Option<String>,
    /// Base part of the first tangent vector (default seeded random).
    #[arg(long = "xi-z")]
    pub xi_z: Option<String>,
    #[arg(long = "eta-w")]
    pub eta_w: Option<String>,
    #[arg(long = "eta-z")]
    pub eta_z: Option<String>,
    /// Multiplier for the pullback scaling check.
    #[arg(long = "N", default_value_t = 2)]
    pub n: i64,
    /// Report only the pullback scaling ratio.
    #[arg(long)]
    pub scaling: bool,
}

fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn tangent(w: &Option<String>, z: &Option<String>, g: usize, rng: &mut ChaCha8Rng) -> CliResult<TangentVector> {
    let rw = DVector::from_fn(g, |_, _| random_c(rng));
    let rz = DMatrix::from_fn(g, g, |_, _| random_c(rng));
    let tw = match w {
        Some(s) => parse::complex_vector(s)?,
        None => rw,
    };
    let tz = match z {
        Some(s) => parse::complex_matrix(s)?,
        None => rz,
    };
    if tw.len() != g {
        return Err(CliError::Validation(format!(
            "tangent fiber part has length {}, expected {g}",
            tw.len()
        )));
    }
    Ok(TangentVector::new(tw, tz)?)
}

fn reals(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn run_betti(args: &BettiArgs, seed: u64) -> CliResult<Value> {
    let g = args.g;
    if g == 0 {
        return Err(CliError::Validation("g must be at least 1".into()));
    }
    let zm = match &args.z {
        Some(s) => parse::complex_matrix(s)?,
        None => DMatrix::from_diagonal_element(g, g, Complex64::new(0.0, 1.0)),
    };
    if zm.nrows() != g {
        return Err(CliError::Validation(format!(
            "Z is {}x{}, expected {g}x{g}",
            zm.nrows(),
            zm.ncols()
        )));
    }
    let z = SiegelPoint::new(zm)?;
    let w = match &args.w {
        Some(s) => parse::complex_vector(s)?,
        None => DVector::from_element(g, Complex64::new(0.5, 0.5)),
    };
    let d = match &args.d {
        Some(s) => PolarizationType::new(parse::u64_list(s)?)?,
        None => PolarizationType::principal(g),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = tangent(&args.xi_w, &args.xi_z, g, &mut rng)?;
    let eta = tangent(&args.eta_w, &args.eta_z, g, &mut rng)?;

    let ratio = pullback_scaling(&z, &w, &xi, args.n)?;
    let expected = (args.n * args.n) as f64;
    let scaling = json!({
        "n": args.n,
        "ratio": ratio,
        "expected": expected,
        "relative_error": (ratio - expected).abs() / expected,
    });
    if args.scaling {
        return Ok(json!({ "scaling": scaling }));
    }

    let coords = betti_coordinates(&z, &w, &d)?;
    let back = betti_to_fiber(
        &z,
        &BettiCoords::from_raw(coords.a_raw.clone(), coords.b_raw.clone()),
        &d,
    )?;
    let round_trip = (back - &w).iter().map(|c| c.norm()).fold(0.0, f64::max);

    let h = betti_form_hermitian(&z, &w, &xi, &eta)?;
    let omega = betti_form(&z, &w, &xi, &eta)?;
    let xi_ab = tangent_to_real(&z, &w, &d, &xi)?;
    let eta_ab = tangent_to_real(&z, &w, &d, &eta)?;
    let omega_flat = betti_form_flat_polarized(&d, &xi_ab, &eta_ab)?;
    let scale = omega.abs().max(omega_flat.abs()).max(f64::MIN_POSITIVE);

    let mut frame: Vec<TangentVector> = (0..g)
        .map(|k| {
            let mut e = DVector::zeros(g);
            e[k] = Complex64::new(1.0, 0.0);
            TangentVector::new(e, DMatrix::zeros(g, g))
        })
        .collect::<Result<_, _>>()?;
    let kernel = kernel_directions(&z, &w)?;
    let kernel_len = kernel.len();
    frame.extend(kernel);
    frame.push(xi.clone());
    frame.push(eta.clone());
    let gram = hermitian_gram(&z, &w, &frame)?;
    let (min_eig, max_eig) = hermitian_eigen_range(&gram);
    let kernel_h: f64 = (g..g + kernel_len).map(|i| gram[(i, i)].norm()).fold(0.0, f64::max);

    Ok(json!({
        "coordinates": {
            "a": reals(&coords.a),
            "b": reals(&coords.b),
            "a_raw": reals(&coords.a_raw),
            "b_raw": reals(&coords.b_raw),
            "round_trip_error": round_trip,
        },
        "tangents": {
            "xi_w": xi.w.iter().map(|c| pair(*c)).collect::<Vec<_>>(),
            "eta_w": eta.w.iter().map(|c| pair(*c)).collect::<Vec<_>>(),
        },
        "form": {
            "hermitian": pair(h),
            "omega": omega,
            "omega_flat": omega_flat,
            "relative_difference": (omega - omega_flat).abs() / scale,
        },
        "gram": {
            "frame_size": frame.len(),
            "min_eigenvalue": min_eig,
            "max_eigenvalue": max_eig,
            "psd": min_eig >= -1e-10 * max_eig.max(0.0),
            "kernel_directions": kernel_len,
            "max_kernel_value": kernel_h,
        },
        "scaling": scaling,
    }))
}

#[derive(Args, Debug)]
pub struct NondegeneracyArgs {
    #[arg(long, default_value = "legendre")]
    pub family: String,
    /// Section name: const_x2, two_torsion_0 or two_torsion_1.
    #[arg(long)]
    pub section: String,
    /// Base point `lambda0` as a complex literal.
    #[arg(long)]
    pub lambda: String,
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    #[arg(long = "rank-tol", default_value_t = 1e-6)]
    pub rank_tol: f64,
    #[arg(long = "noise-floor", default_value_t = 1e-6)]
    pub noise_floor: f64,
    /// Skip the half-step rank comparison.
    #[arg(long = "no-halving")]
    pub no_halving: bool,
}

pub fn run_nondegeneracy(args: &NondegeneracyArgs) -> CliResult<Value> {
    if args.family != "legendre" {
        return Err(CliError::Validation(format!(
            "unknown family {:?}; only legendre is built in",
            args.family
        )));
    }
    let section: LegendreSection = args.section.parse()?;
    let lambda = parse::complex(&args.lambda)?;
    let chart = LegendreChart::new(lambda, section)?;
    let opts = RankOptions {
        step: args.step,
        rank_tol: args.rank_tol,
        noise_floor: args.noise_floor,
        check_halving: !args.no_halving,
    };
    let r = numerical_betti_rank(&chart, &[0.0, 0.0], &opts)?;
    let jac: Vec<Vec<f64>> = (0..r.jacobian.nrows())
        .map(|i| r.jacobian.row(i).iter().copied().collect())
        .collect();
    let sv = &r.singular_values;
    let ratio = if sv.len() >= 2 && sv[0] > 0.0 {
        sv[1] / sv[0]
    } else {
        0.0
    };
    Ok(json!({
        "family": args.family,
        "section": section.name(),
        "lambda": pair(lambda),
        "rank": r.rank,
        "full_rank": 2,
        "nondegenerate": r.rank == 2,
        "singular_values": sv,
        "sigma_ratio": ratio,
        "rank_half_step": r.rank_half_step,
        "stable": r.stable,
        "frame_form": r.frame_form,
        "step": r.step,
        "jacobian": jac,
    }))
}
