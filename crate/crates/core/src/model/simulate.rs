use rand_distr::{Distribution, StandardNormal};

use super::CouplingMatrix;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// `max(1000, ceil(20 / (1 - s)))` steps.
pub fn default_burn_in(s: f64) -> usize {
    let mixing = (20.0 / (1.0 - s)).ceil();
    if mixing.is_finite() {
        (mixing as usize).max(1000)
    } else {
        usize::MAX
    }
}

/// Node-major sample of the AR(1) process: `values[i * t_len + t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSample {
    n: usize,
    t_len: usize,
    values: Vec<f64>,
    seed: u64,
    burn_in: usize,
}

impl TimeSeriesSample {
    pub fn new(
        n: usize,
        t_len: usize,
        values: Vec<f64>,
        seed: u64,
        burn_in: usize,
    ) -> Result<Self> {
        if values.len() != n * t_len {
            return Err(Error::invalid(format!(
                "expected {} values for {n} x {t_len}, got {}",
                n * t_len,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at node {}, step {}",
                pos / t_len.max(1),
                pos % t_len.max(1)
            )));
        }
        Ok(Self {
            n,
            t_len,
            values,
            seed,
            burn_in,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn series(&self, node: usize) -> &[f64] {
        &self.values[node * self.t_len..(node + 1) * self.t_len]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Step-by-step generator for `X_t = A X_{t-1} + e_t`, started from
/// `X_0 = 0`. Noise is drawn node by node within each step.
pub struct Ar1Process<'a> {
    a: &'a CouplingMatrix,
    state: Vec<f64>,
    next: Vec<f64>,
    rng: Rng,
}

impl<'a> Ar1Process<'a> {
    pub fn new(a: &'a CouplingMatrix, seed: u64) -> Self {
        let n = a.n();
        Self {
            a,
            state: vec![0.0; n],
            next: vec![0.0; n],
            rng: rng_from_seed(seed),
        }
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    /// Advance one step and return the new state.
    pub fn step(&mut self) -> &[f64] {
        let a = self.a.entries();
        // A is symmetric, so row i equals column i (contiguous in memory)
        for (i, out) in self.next.iter_mut().enumerate() {
            let col = a.column(i);
            let drift: f64 = col.iter().zip(&self.state).map(|(c, x)| c * x).sum();
            let noise: f64 = StandardNormal.sample(&mut self.rng);
            *out = drift + noise;
        }
        std::mem::swap(&mut self.state, &mut self.next);
        &self.state
    }
}

/// Run `burn_in + t_len` steps and keep the last `t_len`.
pub fn simulate_ar1(
    a: &CouplingMatrix,
    t_len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<TimeSeriesSample> {
    if t_len == 0 {
        return Err(Error::invalid("t_len must be positive"));
    }
    let n = a.n();
    let mut process = Ar1Process::new(a, seed);
    for _ in 0..burn_in {
        process.step();
    }
    let mut values = vec![0.0; n * t_len];
    for t in 0..t_len {
        for (i, &x) in process.step().iter().enumerate() {
            values[i * t_len + t] = x;
        }
    }
    TimeSeriesSample::new(n, t_len, values, seed, burn_in)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn variance(xs: &[f64]) -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn burn_in_default() {
        assert_eq!(default_burn_in(0.5), 1000);
        assert_eq!(default_burn_in(0.99), 2000);
        assert_eq!(default_burn_in(0.999), 20000);
    }

    #[test]
    fn zero_length_rejected() {
        let a = CouplingMatrix::from_symmetric(DMatrix::zeros(2, 2)).unwrap();
        assert!(simulate_ar1(&a, 0, 0, 1).is_err());
    }

    #[test]
    fn white_noise_variance() {
        let a = CouplingMatrix::from_symmetric(DMatrix::zeros(3, 3)).unwrap();
        let t = 100_000;
        let ts = simulate_ar1(&a, t, 0, 5).unwrap();
        // s.e. of a sample variance of N(0,1) is sqrt(2/(t-1))
        let se = (2.0 / (t - 1) as f64).sqrt();
        for i in 0..3 {
            assert!((variance(ts.series(i)) - 1.0).abs() < 3.0 * se);
        }
    }

    #[test]
    fn scalar_ar_stationary_variance() {
        let a = CouplingMatrix::from_symmetric(DMatrix::identity(2, 2) * 0.9).unwrap();
        let ts = simulate_ar1(&a, 1_000_000, default_burn_in(0.9), 9).unwrap();
        let target = 1.0 / (1.0 - 0.81);
        for i in 0..2 {
            let v = variance(ts.series(i));
            assert!((v - target).abs() < 0.05 * target, "variance {v}");
        }
    }

    #[test]
    fn bit_reproducible() {
        let a =
            CouplingMatrix::from_symmetric(DMatrix::from_fn(
                4,
                4,
                |i, j| {
                    if i == j {
                        0.1
                    } else {
                        0.15
                    }
                },
            ))
            .unwrap();
        let x = simulate_ar1(&a, 500, 100, 42).unwrap();
        let y = simulate_ar1(&a, 500, 100, 42).unwrap();
        assert_eq!(x, y);
        assert!(x
            .values()
            .iter()
            .zip(y.values())
            .all(|(p, q)| p.to_bits() == q.to_bits()));
        assert_ne!(x, simulate_ar1(&a, 500, 100, 43).unwrap());
    }
}
