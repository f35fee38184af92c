use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BinaryGraph;
use crate::rng::{rng_from_seed, Rng};

/// Link-strength distribution for weighted structural connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightDistribution {
    /// Uniform on the open interval (0, 1).
    Uniform01,
    /// |N(0, 1)|.
    HalfNormal,
}

impl WeightDistribution {
    fn sample(self, rng: &mut Rng) -> f64 {
        loop {
            let w: f64 = match self {
                WeightDistribution::Uniform01 => Open01.sample(rng),
                WeightDistribution::HalfNormal => {
                    let z: f64 = StandardNormal.sample(rng);
                    z.abs()
                }
            };
            if w > 0.0 {
                return w;
            }
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" => Ok(Self::Uniform01),
            "halfnormal" => Ok(Self::HalfNormal),
            other => Err(Error::invalid(format!(
                "unknown weight distribution `{other}` (expected uniform01 or halfnormal)"
            ))),
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Uniform01 => "uniform01",
            Self::HalfNormal => "halfnormal",
        })
    }
}

/// Symmetric, zero-diagonal coupling topology, optionally carrying positive
/// link strengths on its edges.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralGraph {
    topology: BinaryGraph,
    weights: Option<DMatrix<f64>>,
}

impl StructuralGraph {
    pub fn from_topology(topology: BinaryGraph) -> Self {
        Self {
            topology,
            weights: None,
        }
    }

    /// Weighted variant. `weights` must be symmetric, non-negative and
    /// nonzero exactly on the edges of `topology`.
    pub fn with_weights(topology: BinaryGraph, weights: DMatrix<f64>) -> Result<Self> {
        let n = topology.n();
        if weights.nrows() != n || weights.ncols() != n {
            return Err(Error::invalid(
                "weight matrix shape does not match topology",
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let w = weights[(i, j)];
                let edge = topology.has_edge(i, j);
                if w != weights[(j, i)] || w < 0.0 || !w.is_finite() || (w > 0.0) != edge {
                    return Err(Error::invalid(format!(
                        "weight ({i}, {j}) = {w} inconsistent with topology"
                    )));
                }
            }
        }
        Ok(Self {
            topology,
            weights: Some(weights),
        })
    }

    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub fn topology(&self) -> &BinaryGraph {
        &self.topology
    }

    pub fn weights(&self) -> Option<&DMatrix<f64>> {
        self.weights.as_ref()
    }

    /// 0/1 adjacency matrix.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (i, j) in self.topology.edges() {
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
        }
        m
    }

    /// The matrix that enters the coupling: weights if present, else adjacency.
    pub fn coupling_base(&self) -> DMatrix<f64> {
        match &self.weights {
            Some(w) => w.clone(),
            None => self.adjacency(),
        }
    }
}

fn check_er_args(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

fn sample_gnp(n: usize, p: f64, rng: &mut Rng) -> BinaryGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // random() is in [0, 1): p = 0 never fires, p = 1 always does
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    BinaryGraph::from_edges(n, edges).expect("generated edges are valid")
}

/// G(n, p): every unordered pair independently carries an edge with
/// probability `p`. Pairs are visited in lexicographic order, one uniform
/// draw each.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<StructuralGraph> {
    check_er_args(n, p)?;
    let mut rng = rng_from_seed(seed);
    Ok(StructuralGraph::from_topology(sample_gnp(n, p, &mut rng)))
}

/// As [`generate_er`] (same topology for the same seed), followed by one
/// i.i.d. positive weight per edge in lexicographic edge order.
pub fn generate_weighted_er(
    n: usize,
    p: f64,
    dist: WeightDistribution,
    seed: u64,
) -> Result<StructuralGraph> {
    check_er_args(n, p)?;
    let mut rng = rng_from_seed(seed);
    let topology = sample_gnp(n, p, &mut rng);
    let mut weights = DMatrix::zeros(n, n);
    for (i, j) in topology.edges() {
        let w = dist.sample(&mut rng);
        weights[(i, j)] = w;
        weights[(j, i)] = w;
    }
    Ok(StructuralGraph {
        topology,
        weights: Some(weights),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        let g = generate_er(5, 0.0, 1).unwrap();
        assert_eq!(g.topology().edge_count(), 0);
        let g = generate_er(5, 1.0, 1).unwrap();
        assert_eq!(g.topology().edge_count(), 10);
    }

    #[test]
    fn er_rejects_bad_args() {
        assert!(matches!(
            generate_er(1, 0.5, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(generate_er(5, 1.5, 0).is_err());
        assert!(generate_er(5, -0.1, 0).is_err());
    }

    #[test]
    fn er_is_seed_deterministic() {
        assert_eq!(
            generate_er(40, 0.3, 11).unwrap(),
            generate_er(40, 0.3, 11).unwrap()
        );
        assert_ne!(
            generate_er(40, 0.3, 11).unwrap(),
            generate_er(40, 0.3, 12).unwrap()
        );
    }

    #[test]
    fn er_adjacency_symmetric_zero_diagonal() {
        for seed in 0..50 {
            let a = generate_er(30, 0.2, seed).unwrap().adjacency();
            for i in 0..30 {
                assert_eq!(a[(i, i)], 0.0);
                for j in 0..30 {
                    assert_eq!(a[(i, j)], a[(j, i)]);
                }
            }
        }
    }

    #[test]
    fn er_mean_edge_count_matches_binomial() {
        let (n, p, runs) = (500usize, 0.1, 1000u64);
        let pairs = (n * (n - 1) / 2) as f64;
        let mean = (0..runs)
            .map(|s| generate_er(n, p, s).unwrap().topology().edge_count() as f64)
            .sum::<f64>()
            / runs as f64;
        let se = (pairs * p * (1.0 - p) / runs as f64).sqrt();
        assert!((mean - 12475.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn weighted_examples() {
        let g = generate_weighted_er(4, 1.0, WeightDistribution::Uniform01, 3).unwrap();
        let w = g.weights().unwrap();
        let mut count = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(w[(i, j)] > 0.0 && w[(i, j)] < 1.0);
                count += 1;
            }
        }
        assert_eq!(count, 6);

        for dist in [
            WeightDistribution::Uniform01,
            WeightDistribution::HalfNormal,
        ] {
            let g = generate_weighted_er(4, 0.0, dist, 3).unwrap();
            assert!(g.weights().unwrap().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn weighted_topology_matches_unweighted() {
        let a = generate_er(50, 0.2, 77).unwrap();
        let b = generate_weighted_er(50, 0.2, WeightDistribution::HalfNormal, 77).unwrap();
        assert_eq!(a.topology(), b.topology());
        StructuralGraph::with_weights(b.topology().clone(), b.weights().unwrap().clone()).unwrap();
    }

    #[test]
    fn uniform_weight_mean() {
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..40 {
            let g = generate_weighted_er(100, 0.5, WeightDistribution::Uniform01, seed).unwrap();
            let w = g.weights().unwrap();
            for (i, j) in g.topology().edges() {
                sum += w[(i, j)];
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let se = (1.0f64 / 12.0 / count as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn unknown_distribution_rejected() {
        assert!("gaussian".parse::<WeightDistribution>().is_err());
        assert_eq!(
            "halfnormal".parse::<WeightDistribution>().unwrap(),
            WeightDistribution::HalfNormal
        );
    }
}
