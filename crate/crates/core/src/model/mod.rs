//! Structural connectivity, the normalized AR(1) coupling matrix, simulation
//! of the process and its exact stationary covariance.

mod coupling;
mod covariance;
mod simulate;
mod structural;

pub use coupling::{build_coupling, spectral_radius, CouplingMatrix, SPECTRAL_TOL};
pub use covariance::{
    asymptotic_covariance, cov_to_corr, neumann_partial_sum, sample_covariance,
    CovarianceAccumulator, CovarianceMatrix,
};
pub use simulate::{default_burn_in, simulate_ar1, Ar1Process, TimeSeriesSample};
pub use structural::{generate_er, generate_weighted_er, StructuralGraph, WeightDistribution};

use nalgebra::DMatrix;

/// Largest asymmetry `|m_ij - m_ji|` tolerated, relative to the largest entry.
pub(crate) const SYMMETRY_TOL: f64 = 1e-12;

pub(crate) fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= SYMMETRY_TOL * scale))
}
