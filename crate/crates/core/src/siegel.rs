//! Betti coordinates and the Betti form on `C^g x H_g`.
//!
//! A point of the Siegel upper half space is a complex symmetric `g x g`
//! matrix `Z = X + iY` with `Y` positive definite. For a polarization type
//! `D = diag(d_1, ..., d_g)` the fiber over `Z` is `C^g / (D Z^g + Z Z^g)`,
//! and the Betti coordinates of `w` are the unique real vectors `(a, b)` with
//! `w = D a + Z b`. The lattice basis is taken in the order
//! `(D e_1, ..., D e_g, Z e_1, ..., Z e_g)`, which fixes the branch.
//!
//! The Betti form is evaluated two ways: through the Hermitian form
//! `H(xi, eta) = v(xi)^T Y^{-1} conj(v(eta))`, `v(xi) = xi_Z Y^{-1} Im(w) - xi_w`,
//! whose associated real 2-form is `-2 Im H`, and through the flat expression
//! `2 (D da)^T ∧ db` after pushing tangent vectors into `(a, b)` coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Inputs with `cond(Im Z)` above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Largest accepted change of an unwrapped Betti coordinate between a chart
/// sample and the chart center.
pub const BRANCH_JUMP_LIMIT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SiegelError {
    #[error("Im Z is not a usable positive definite matrix (eigenvalues in [{min_eig:e}, {max_eig:e}])")]
    SingularY { min_eig: f64, max_eig: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid polarization type: {0}")]
    BadPolarization(String),
    #[error("the Betti form vanishes on this direction; the scaling ratio is undefined")]
    DegenerateDirection,
    #[error("Betti coordinate {coord} jumped by {delta:.3} along chart parameter {param}; reduce the step")]
    BranchJump { param: usize, coord: usize, delta: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("chart evaluation failed: {0}")]
    Chart(String),
}

pub type Result<T> = std::result::Result<T, SiegelError>;

/// A point `Z` of the Siegel upper half space.
#[derive(Debug, Clone)]
pub struct SiegelPoint {
    z: DMatrix<C64>,
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    im_inv: DMatrix<f64>,
}

impl SiegelPoint {
    /// Builds a Siegel point from a square matrix. The upper triangle is
    /// authoritative; the lower triangle is overwritten to make `Z` exactly
    /// symmetric.
    pub fn new(mut z: DMatrix<C64>) -> Result<Self> {
        if z.nrows() != z.ncols() {
            return Err(SiegelError::DimensionMismatch {
                expected: z.nrows(),
                got: z.ncols(),
            });
        }
        if z.nrows() == 0 {
            return Err(SiegelError::InvalidArgument("genus must be positive".into()));
        }
        let g = z.nrows();
        for i in 0..g {
            for j in (i + 1)..g {
                z[(j, i)] = z[(i, j)];
            }
        }
        let re = z.map(|c| c.re);
        let im = z.map(|c| c.im);
        let eig = im.clone().symmetric_eigenvalues();
        let min_eig = eig.min();
        let max_eig = eig.max();
        if !(min_eig > 0.0) || !min_eig.is_finite() || max_eig / min_eig > MAX_CONDITION {
            return Err(SiegelError::SingularY { min_eig, max_eig });
        }
        let im_inv = im
            .clone()
            .cholesky()
            .ok_or(SiegelError::SingularY { min_eig, max_eig })?
            .inverse();
        Ok(SiegelPoint { z, re, im, im_inv })
    }

    pub fn scalar(tau: C64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, tau))
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn genus(&self) -> usize {
        self.z.nrows()
    }

    pub fn z(&self) -> &DMatrix<C64> {
        &self.z
    }

    pub fn re(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn im_inv(&self) -> &DMatrix<f64> {
        &self.im_inv
    }
}

/// Polarization type `D = diag(d_1, ..., d_g)` with `d_1 | d_2 | ... | d_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizationType(Vec<u64>);

impl PolarizationType {
    pub fn new(d: Vec<u64>) -> Result<Self> {
        if d.is_empty() {
            return Err(SiegelError::BadPolarization("empty".into()));
        }
        if d.contains(&0) {
            return Err(SiegelError::BadPolarization(format!("{d:?} has a zero entry")));
        }
        if d.windows(2).any(|p| p[1] % p[0] != 0) {
            return Err(SiegelError::BadPolarization(format!("{d:?} is not a divisor chain")));
        }
        Ok(PolarizationType(d))
    }

    pub fn principal(g: usize) -> Self {
        PolarizationType(vec![1; g])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_principal(&self) -> bool {
        self.0.iter().all(|&d| d == 1)
    }

    fn weight(&self, i: usize) -> f64 {
        self.0[i] as f64
    }
}

/// Betti coordinates `(a, b)`: reduced representatives in `[0,1)^g` and the
/// unreduced solution of `w = D a + Z b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiCoords {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    pub a_raw: DVector<f64>,
    pub b_raw: DVector<f64>,
}

impl BettiCoords {
    /// Coordinates given by an unreduced real pair.
    pub fn from_raw(a_raw: DVector<f64>, b_raw: DVector<f64>) -> Self {
        BettiCoords {
            a: a_raw.map(frac),
            b: b_raw.map(frac),
            a_raw,
            b_raw,
        }
    }

    pub fn zero(g: usize) -> Self {
        Self::from_raw(DVector::zeros(g), DVector::zeros(g))
    }

    pub fn genus(&self) -> usize {
        self.a.len()
    }

    /// `(a, b)` reduced, as one vector of length `2g`.
    pub fn reduced(&self) -> DVector<f64> {
        stack(&self.a, &self.b)
    }

    /// `(a, b)` unreduced, as one vector of length `2g`.
    pub fn raw(&self) -> DVector<f64> {
        stack(&self.a_raw, &self.b_raw)
    }
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed distance of `x` to the nearest integer, in `[-1/2, 1/2]`.
pub fn centered_frac(x: f64) -> f64 {
    x - x.round()
}

fn stack(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// A tangent vector `(xi_w, xi_Z)` at a point of `C^g x H_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub w: DVector<C64>,
    pub z: DMatrix<C64>,
}

impl TangentVector {
    /// The upper triangle of `xi_z` is authoritative.
    pub fn new(w: DVector<C64>, mut z: DMatrix<C64>) -> Result<Self> {
        let g = w.len();
        if z.nrows() != g || z.ncols() != g {
            return Err(SiegelError::DimensionMismatch {
                expected: g,
                got: z.nrows().max(z.ncols()),
            });
        }
        for i in 0..g {
            for j in (i + 1)..g {
                z[(j, i)] = z[(i, j)];
            }
        }
        Ok(TangentVector { w, z })
    }

    /// Purely vertical direction (`xi_Z = 0`).
    pub fn fiber(w: DVector<C64>) -> Self {
        let g = w.len();
        TangentVector {
            w,
            z: DMatrix::zeros(g, g),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        TangentVector {
            w: &self.w * s,
            z: &self.z * s,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.w.norm_squared() + self.z.norm_squared()
    }
}

fn check_len(z: &SiegelPoint, n: usize) -> Result<()> {
    if z.genus() != n {
        return Err(SiegelError::DimensionMismatch {
            expected: z.genus(),
            got: n,
        });
    }
    Ok(())
}

fn check_tangent(z: &SiegelPoint, xi: &TangentVector) -> Result<()> {
    check_len(z, xi.w.len())?;
    check_len(z, xi.z.nrows())
}

fn real_to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Solves `w = D a + Z b` for the real vectors `(a, b)`.
pub fn betti_coordinates(z: &SiegelPoint, w: &DVector<C64>, d: &PolarizationType) -> Result<BettiCoords> {
    let g = z.genus();
    check_len(z, w.len())?;
    check_len(z, d.len())?;
    // Rows: Re w = D a + X b, Im w = Y b. Unknowns ordered (a, b).
    let mut m = DMatrix::<f64>::zeros(2 * g, 2 * g);
    let mut rhs = DVector::<f64>::zeros(2 * g);
    for i in 0..g {
        m[(i, i)] = d.weight(i);
        for j in 0..g {
            m[(i, g + j)] = z.re()[(i, j)];
            m[(g + i, g + j)] = z.im()[(i, j)];
        }
        rhs[i] = w[i].re;
        rhs[g + i] = w[i].im;
    }
    let sol = m.lu().solve(&rhs).ok_or_else(|| {
        let eig = z.im().clone().symmetric_eigenvalues();
        SiegelError::SingularY {
            min_eig: eig.min(),
            max_eig: eig.max(),
        }
    })?;
    let a_raw = sol.rows(0, g).into_owned();
    let b_raw = sol.rows(g, g).into_owned();
    Ok(BettiCoords::from_raw(a_raw, b_raw))
}

/// `w = D a + Z b` from the unreduced coordinates.
pub fn betti_to_fiber(z: &SiegelPoint, c: &BettiCoords, d: &PolarizationType) -> Result<DVector<C64>> {
    check_len(z, c.genus())?;
    check_len(z, d.len())?;
    let b = c.b_raw.map(|x| C64::new(x, 0.0));
    let mut w = z.z() * b;
    for i in 0..z.genus() {
        w[i] += C64::new(d.weight(i) * c.a_raw[i], 0.0);
    }
    Ok(w)
}

/// `v(xi) = xi_Z Y^{-1} Im(w) - xi_w`.
fn v_vector(z: &SiegelPoint, w: &DVector<C64>, xi: &TangentVector) -> DVector<C64> {
    let beta = beta_vector(z, w).map(|x| C64::new(x, 0.0));
    &xi.z * beta - &xi.w
}

fn beta_vector(z: &SiegelPoint, w: &DVector<C64>) -> DVector<f64> {
    z.im_inv() * w.map(|c| c.im)
}

/// The Hermitian form `H(xi, eta)` attached to the Betti form.
pub fn betti_form_hermitian(z: &SiegelPoint, w: &DVector<C64>, xi: &TangentVector, eta: &TangentVector) -> Result<C64> {
    check_len(z, w.len())?;
    check_tangent(z, xi)?;
    check_tangent(z, eta)?;
    let vx = v_vector(z, w, xi);
    let ve = v_vector(z, w, eta).map(|c| c.conj());
    let yinv = real_to_complex(z.im_inv());
    Ok((vx.transpose() * yinv * ve)[(0, 0)])
}

/// Value of the real 2-form `omega(xi, eta) = -2 Im H(xi, eta)`.
pub fn betti_form(z: &SiegelPoint, w: &DVector<C64>, xi: &TangentVector, eta: &TangentVector) -> Result<f64> {
    Ok(-2.0 * betti_form_hermitian(z, w, xi, eta)?.im)
}

/// Flat expression `2 (da)^T ∧ db` on real vectors split as `(da, db)`.
pub fn betti_form_flat(xi_ab: &DVector<f64>, eta_ab: &DVector<f64>) -> Result<f64> {
    let n = xi_ab.len();
    if !n.is_multiple_of(2) || eta_ab.len() != n {
        return Err(SiegelError::DimensionMismatch {
            expected: n + n % 2,
            got: eta_ab.len(),
        });
    }
    betti_form_flat_polarized(&PolarizationType::principal(n / 2), xi_ab, eta_ab)
}

/// Flat expression `2 (D da)^T ∧ db` for a polarization of type `D`.
pub fn betti_form_flat_polarized(d: &PolarizationType, xi_ab: &DVector<f64>, eta_ab: &DVector<f64>) -> Result<f64> {
    let g = d.len();
    if xi_ab.len() != 2 * g {
        return Err(SiegelError::DimensionMismatch {
            expected: 2 * g,
            got: xi_ab.len(),
        });
    }
    if eta_ab.len() != 2 * g {
        return Err(SiegelError::DimensionMismatch {
            expected: 2 * g,
            got: eta_ab.len(),
        });
    }
    let s: f64 = (0..g)
        .map(|i| d.weight(i) * (xi_ab[i] * eta_ab[g + i] - eta_ab[i] * xi_ab[g + i]))
        .sum();
    Ok(2.0 * s)
}

/// Differential of `(w, Z) -> (a, b)` applied to a tangent vector.
///
/// From `w = D a + Z b`: `dIm w = dY b + Y db` and `dRe w = D da + dX b + X db`.
pub fn tangent_to_real(
    z: &SiegelPoint,
    w: &DVector<C64>,
    d: &PolarizationType,
    xi: &TangentVector,
) -> Result<DVector<f64>> {
    let g = z.genus();
    check_len(z, w.len())?;
    check_len(z, d.len())?;
    check_tangent(z, xi)?;
    let b = beta_vector(z, w);
    let dx = xi.z.map(|c| c.re);
    let dy = xi.z.map(|c| c.im);
    let db = z.im_inv() * (xi.w.map(|c| c.im) - &dy * &b);
    let rest = xi.w.map(|c| c.re) - &dx * &b - z.re() * &db;
    let da = DVector::from_iterator(g, (0..g).map(|i| rest[i] / d.weight(i)));
    Ok(stack(&da, &db))
}

fn degeneracy_scale(z: &SiegelPoint, w: &DVector<C64>, xi: &TangentVector) -> f64 {
    let beta = beta_vector(z, w);
    let yinv = z.im_inv().norm();
    (xi.w.norm() + xi.z.norm() * beta.norm()).powi(2) * yinv
}

/// `H` at `(N w, Z)` on `(N xi_w, xi_Z)` divided by `H` at `(w, Z)` on `xi`.
pub fn pullback_scaling(z: &SiegelPoint, w: &DVector<C64>, xi: &TangentVector, n: i64) -> Result<f64> {
    if n == 0 {
        return Err(SiegelError::InvalidArgument("N must be nonzero".into()));
    }
    let base = betti_form_hermitian(z, w, xi, xi)?.re;
    if base <= 1e-12 * degeneracy_scale(z, w, xi) || base <= f64::MIN_POSITIVE {
        return Err(SiegelError::DegenerateDirection);
    }
    let nf = C64::new(n as f64, 0.0);
    let w_n = w * nf;
    let xi_n = TangentVector {
        w: &xi.w * nf,
        z: xi.z.clone(),
    };
    let scaled = betti_form_hermitian(z, &w_n, &xi_n, &xi_n)?.re;
    Ok(scaled / base)
}

/// A complex basis of the kernel `{xi : xi_w = xi_Z Y^{-1} Im(w)}`, one vector
/// per elementary symmetric matrix `xi_Z`.
pub fn kernel_directions(z: &SiegelPoint, w: &DVector<C64>) -> Result<Vec<TangentVector>> {
    let g = z.genus();
    check_len(z, w.len())?;
    let beta = beta_vector(z, w).map(|x| C64::new(x, 0.0));
    let mut out = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        for j in i..g {
            let mut e = DMatrix::<C64>::zeros(g, g);
            e[(i, j)] = C64::new(1.0, 0.0);
            e[(j, i)] = C64::new(1.0, 0.0);
            let xw = &e * &beta;
            out.push(TangentVector { w: xw, z: e });
        }
    }
    Ok(out)
}

/// Gram matrix `[H(xi_i, xi_j)]` of the Hermitian form over a frame.
pub fn hermitian_gram(z: &SiegelPoint, w: &DVector<C64>, frame: &[TangentVector]) -> Result<DMatrix<C64>> {
    let n = frame.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = betti_form_hermitian(z, w, &frame[i], &frame[j])?;
        }
    }
    Ok(m)
}

/// Smallest and largest eigenvalue of a Hermitian matrix, via its real
/// `2n x 2n` symmetric realification.
pub fn hermitian_eigen_range(h: &DMatrix<C64>) -> (f64, f64) {
    let n = h.nrows();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // Symmetrize against round-off before realifying.
            let c = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            r[(i, j)] = c.re;
            r[(n + i, n + j)] = c.re;
            r[(i, n + j)] = -c.im;
            r[(n + i, j)] = c.im;
        }
    }
    let eig = r.symmetric_eigenvalues();
    (eig.min(), eig.max())
}

/// A real-analytic chart `t -> (Z(t), w(t))` from a `k`-cube.
pub trait Chart: Sync {
    fn param_dim(&self) -> usize;

    fn genus(&self) -> usize;

    fn polarization(&self) -> PolarizationType {
        PolarizationType::principal(self.genus())
    }

    fn eval(&self, t: &[f64]) -> Result<(SiegelPoint, DVector<C64>)>;
}

/// `t -> (Z, w0 + sum_k t_k v_k)` at a fixed `Z`.
#[derive(Debug, Clone)]
pub struct FiberLineChart {
    pub z: SiegelPoint,
    pub w0: DVector<C64>,
    pub directions: Vec<DVector<C64>>,
    pub polarization: PolarizationType,
}

impl Chart for FiberLineChart {
    fn param_dim(&self) -> usize {
        self.directions.len()
    }

    fn genus(&self) -> usize {
        self.z.genus()
    }

    fn polarization(&self) -> PolarizationType {
        self.polarization.clone()
    }

    fn eval(&self, t: &[f64]) -> Result<(SiegelPoint, DVector<C64>)> {
        let mut w = self.w0.clone();
        for (tk, v) in t.iter().zip(&self.directions) {
            w += v * C64::new(*tk, 0.0);
        }
        Ok((self.z.clone(), w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    pub step: f64,
    /// Singular values below `rank_tol * sigma_max` do not count.
    pub rank_tol: f64,
    /// Absolute floor for counted singular values; finite-difference noise
    /// on a constant map sits well below it.
    pub noise_floor: f64,
    /// Recompute with half the step and compare ranks.
    pub check_halving: bool,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            step: 1e-4,
            rank_tol: 1e-6,
            noise_floor: 1e-6,
            check_halving: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// `2g x k` Jacobian of the unreduced Betti coordinates.
    pub jacobian: DMatrix<f64>,
    pub rank_half_step: Option<usize>,
    pub stable: bool,
    /// `omega(d/dt_1, d/dt_2)` via the flat form, for two-parameter charts.
    pub frame_form: Option<f64>,
    pub step: f64,
}

/// Central-difference Jacobian of `t -> (a, b)` with samples unwrapped onto
/// the branch of the chart center.
pub fn betti_jacobian(chart: &dyn Chart, t0: &[f64], step: f64) -> Result<DMatrix<f64>> {
    if !(step > 0.0) {
        return Err(SiegelError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    let k = chart.param_dim();
    if t0.len() != k {
        return Err(SiegelError::DimensionMismatch {
            expected: k,
            got: t0.len(),
        });
    }
    let d = chart.polarization();
    let coords_at = |t: &[f64]| -> Result<DVector<f64>> {
        let (z, w) = chart.eval(t)?;
        Ok(betti_coordinates(&z, &w, &d)?.raw())
    };
    let center = coords_at(t0)?;
    let n = center.len();
    let mut jac = DMatrix::<f64>::zeros(n, k);
    for p in 0..k {
        let mut tp = t0.to_vec();
        let mut tm = t0.to_vec();
        tp[p] += step;
        tm[p] -= step;
        let side = |t: &[f64]| -> Result<DVector<f64>> {
            let mut c = coords_at(t)?;
            for i in 0..n {
                c[i] -= (c[i] - center[i]).round();
                let delta = (c[i] - center[i]).abs();
                if delta > BRANCH_JUMP_LIMIT {
                    return Err(SiegelError::BranchJump {
                        param: p,
                        coord: i,
                        delta,
                    });
                }
            }
            Ok(c)
        };
        let plus = side(&tp)?;
        let minus = side(&tm)?;
        for i in 0..n {
            jac[(i, p)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    Ok(jac)
}

fn singular_values_desc(m: &DMatrix<f64>) -> Vec<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

fn count_rank(s: &[f64], opts: &RankOptions) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    let cut = (opts.rank_tol * top).max(opts.noise_floor);
    s.iter().filter(|&&x| x > cut).count()
}

/// Numerical real rank of the differential of the Betti map along a chart.
///
/// A positive answer certifies non-degeneracy at `t0`; a deficient rank at a
/// single sample says nothing about nearby points.
pub fn numerical_betti_rank(chart: &dyn Chart, t0: &[f64], opts: &RankOptions) -> Result<RankReport> {
    let jacobian = betti_jacobian(chart, t0, opts.step)?;
    let singular_values = singular_values_desc(&jacobian);
    let rank = count_rank(&singular_values, opts);
    let rank_half_step = if opts.check_halving {
        let j2 = betti_jacobian(chart, t0, opts.step / 2.0)?;
        Some(count_rank(&singular_values_desc(&j2), opts))
    } else {
        None
    };
    let frame_form = if jacobian.ncols() == 2 {
        let c0 = jacobian.column(0).into_owned();
        let c1 = jacobian.column(1).into_owned();
        Some(betti_form_flat_polarized(&chart.polarization(), &c0, &c1)?)
    } else {
        None
    };
    Ok(RankReport {
        rank,
        stable: rank_half_step.is_none_or(|r| r == rank),
        singular_values,
        jacobian,
        rank_half_step,
        frame_form,
        step: opts.step,
    })
}
