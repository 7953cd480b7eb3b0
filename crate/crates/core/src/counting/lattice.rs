use nalgebra::{DMatrix, DVector};

use super::{CountingError, Result};

/// Gram matrix of the height pairing on a rank-`rho` subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct MWLattice {
    gram: DMatrix<f64>,
}

impl MWLattice {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(CountingError::NotPsd(format!(
                "{}x{} is not square",
                gram.nrows(),
                gram.ncols()
            )));
        }
        if gram.iter().any(|x| !x.is_finite()) {
            return Err(CountingError::NotPsd("non-finite entry".into()));
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let n = gram.nrows();
        for i in 0..n {
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale {
                    return Err(CountingError::NotPsd(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        if n > 0 {
            let eig = gram.clone().symmetric_eigenvalues();
            if eig.min() < -1e-10 * eig.max().max(0.0) {
                return Err(CountingError::NotPsd(format!("smallest eigenvalue {:e}", eig.min())));
            }
        }
        Ok(MWLattice { gram })
    }

    pub fn identity(rho: usize) -> Self {
        MWLattice {
            gram: DMatrix::identity(rho, rho),
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }
}

/// `sqrt(x^T G x)`, with tiny negative round-off clipped to 0.
pub fn nt_norm(lat: &MWLattice, coords: &[f64]) -> Result<f64> {
    if coords.len() != lat.rank() {
        return Err(CountingError::RankMismatch {
            expected: lat.rank(),
            got: coords.len(),
        });
    }
    let x = DVector::from_column_slice(coords);
    Ok(x.dot(&(&lat.gram * &x)).max(0.0).sqrt())
}

pub fn nt_distance(lat: &MWLattice, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(CountingError::RankMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    nt_norm(lat, &d)
}

/// `(1 + 2R/r)^rho` balls of radius `r` cover any subset of a radius-`R` ball.
pub fn covering_bound(big_r: f64, r: f64, rho: u32) -> Result<f64> {
    if !(big_r > 0.0) || !(r > 0.0) {
        return Err(CountingError::InvalidArgument(format!(
            "radii must be positive, got R = {big_r}, r = {r}"
        )));
    }
    Ok((1.0 + 2.0 * big_r / r).powi(rho as i32))
}

/// Indices of centers chosen by scanning the points in order and promoting
/// every point not yet within `r` of a center.
pub fn greedy_cover(points: &[Vec<f64>], lat: &MWLattice, r: f64) -> Result<Vec<usize>> {
    if !(r > 0.0) {
        return Err(CountingError::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let mut centers: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut covered = false;
        for &c in &centers {
            if nt_distance(lat, p, &points[c])? <= r {
                covered = true;
                break;
            }
        }
        if !covered {
            nt_norm(lat, p)?;
            centers.push(i);
        }
    }
    Ok(centers)
}
