use nalgebra::{Cholesky, DMatrix};

use super::{CouplingMatrix, TimeSeriesSample};
use crate::error::{Error, Result};
use crate::fc::CorrelationMatrix;

/// Condition estimates above this are reported as a numeric failure.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::invalid("covariance matrix must be square"));
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Stationary covariance of the AR(1) process with symmetric `A` and unit
/// noise: the solution of `(I - A^2) Sigma = I`.
///
/// `I - A^2` is symmetric positive definite when the spectral radius `s` of
/// `A` is below 1, so a Cholesky solve is used. Its eigenvalues lie in
/// `[1 - s^2, 1]`, which gives the condition estimate `1 / (1 - s^2)`.
pub fn asymptotic_covariance(a: &CouplingMatrix) -> Result<CovarianceMatrix> {
    let n = a.n();
    let s = a.s();
    let condition = 1.0 / (1.0 - s * s);
    if !(condition.is_finite() && condition > 0.0 && condition <= MAX_CONDITION) {
        return Err(Error::Numeric {
            message: format!("I - A^2 is near singular (s = {s})"),
            condition_estimate: Some(condition),
        });
    }
    let aa = a.entries() * a.entries();
    let system = DMatrix::identity(n, n) - aa;
    let chol = Cholesky::new(system).ok_or_else(|| Error::Numeric {
        message: "Cholesky factorization of I - A^2 failed".into(),
        condition_estimate: Some(condition),
    })?;
    let mut sigma = chol.solve(&DMatrix::identity(n, n));
    symmetrize(&mut sigma);
    Ok(CovarianceMatrix { entries: sigma })
}

/// `sum_{i=0}^{k-1} A^{2i}`, the truncated series for the stationary
/// covariance. Independent of the linear solve in [`asymptotic_covariance`].
pub fn neumann_partial_sum(a: &CouplingMatrix, k: usize) -> Result<CovarianceMatrix> {
    if k == 0 {
        return Err(Error::invalid("term count must be at least 1"));
    }
    let n = a.n();
    let aa = a.entries() * a.entries();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for _ in 1..k {
        term = &term * &aa;
        sum += &term;
    }
    Ok(CovarianceMatrix { entries: sum })
}

/// `rho_ij = Sigma_ij / sqrt(Sigma_ii Sigma_jj)` with an exact unit diagonal.
pub fn cov_to_corr(sigma: &CovarianceMatrix) -> Result<CorrelationMatrix> {
    let m = sigma.entries();
    let n = m.nrows();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = m[(i, i)];
            if d > 0.0 && d.is_finite() {
                Ok(d)
            } else {
                Err(Error::invalid(format!(
                    "diagonal entry {i} is {d}, must be positive"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let mut r = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = m[(i, j)] / (diag[i] * diag[j]).sqrt();
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    CorrelationMatrix::new(r)
}

/// Streaming sample covariance over state vectors.
#[derive(Debug, Clone)]
pub struct CovarianceAccumulator {
    n: usize,
    count: usize,
    sum: Vec<f64>,
    // upper triangle, row-major
    cross: Vec<f64>,
}

impl CovarianceAccumulator {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            count: 0,
            sum: vec![0.0; n],
            cross: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.n);
        self.count += 1;
        let mut k = 0;
        for i in 0..self.n {
            self.sum[i] += x[i];
            let xi = x[i];
            for &xj in &x[i..] {
                self.cross[k] += xi * xj;
                k += 1;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `(count - 1)`-normalized covariance.
    pub fn finish(&self) -> Result<CovarianceMatrix> {
        if self.count < 2 {
            return Err(Error::invalid("need at least two observations"));
        }
        let t = self.count as f64;
        let mean: Vec<f64> = self.sum.iter().map(|s| s / t).collect();
        let mut m = DMatrix::zeros(self.n, self.n);
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let v = (self.cross[k] - t * mean[i] * mean[j]) / (t - 1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
                k += 1;
            }
        }
        Ok(CovarianceMatrix { entries: m })
    }
}

pub fn sample_covariance(ts: &TimeSeriesSample) -> Result<CovarianceMatrix> {
    let n = ts.n();
    let mut acc = CovarianceAccumulator::new(n);
    let mut x = vec![0.0; n];
    for t in 0..ts.t_len() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ts.series(i)[t];
        }
        acc.push(&x);
    }
    acc.finish()
}
