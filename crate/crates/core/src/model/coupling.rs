use nalgebra::{DMatrix, SymmetricEigen};

use super::{is_symmetric, StructuralGraph};
use crate::error::{Error, Result};

/// Convergence tolerance for the dense symmetric eigensolve.
pub const SPECTRAL_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 10_000;

/// Largest eigenvalue magnitude of a symmetric matrix.
///
/// Uses a full dense symmetric eigendecomposition rather than power
/// iteration, which stalls when the two leading eigenvalues are close.
pub fn spectral_radius(m: &DMatrix<f64>, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !is_symmetric(m) {
        return Err(Error::invalid(
            "spectral_radius requires a symmetric matrix",
        ));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    if m.nrows() == 0 || m.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::try_new(m.clone(), tol, EIGEN_MAX_ITER).ok_or_else(|| {
        Error::numeric(format!(
            "symmetric eigensolve did not converge in {EIGEN_MAX_ITER} iterations"
        ))
    })?;
    Ok(eig.eigenvalues.amax())
}

/// AR(1) transition matrix `A = s (SC + alpha I) / lambda_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: DMatrix<f64>,
    s: f64,
    alpha: f64,
    lambda_max: f64,
}

impl CouplingMatrix {
    /// Wrap an arbitrary symmetric matrix with spectral radius below 1.
    ///
    /// The recorded `s` is the measured spectral radius, `alpha` is 0 and
    /// `lambda_max` is 1 (no normalization applied).
    pub fn from_symmetric(entries: DMatrix<f64>) -> Result<Self> {
        let s = spectral_radius(&entries, SPECTRAL_TOL)?;
        if s >= 1.0 {
            return Err(Error::invalid(format!(
                "spectral radius {s} >= 1: process is not stationary"
            )));
        }
        Ok(Self {
            entries,
            s,
            alpha: 0.0,
            lambda_max: 1.0,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

pub fn build_coupling(sc: &StructuralGraph, s: f64, alpha: f64) -> Result<CouplingMatrix> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::invalid(format!(
            "coupling strength s = {s} outside (0, 1)"
        )));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!(
            "alpha = {alpha} must be finite and >= 0"
        )));
    }
    let n = sc.n();
    let mut base = sc.coupling_base();
    for i in 0..n {
        base[(i, i)] += alpha;
    }
    let lambda_max = spectral_radius(&base, SPECTRAL_TOL)?;
    if lambda_max == 0.0 {
        return Err(Error::DegenerateNormalization);
    }
    base *= s / lambda_max;
    Ok(CouplingMatrix {
        entries: base,
        s,
        alpha,
        lambda_max,
    })
}
