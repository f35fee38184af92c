//! Functional connectivity: Pearson correlation matrices, density-targeted
//! binarization and the partial-transitivity diagnostic.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BinaryGraph;
use crate::model::TimeSeriesSample;
use crate::rng::rng_from_seed;

/// Tolerance on the unit diagonal, symmetry and the [-1, 1] range.
pub const CORRELATION_TOL: f64 = 1e-12;

/// Symmetric matrix of pairwise correlations with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::invalid("correlation matrix must be square"));
        }
        let n = entries.nrows();
        for i in 0..n {
            if (entries[(i, i)] - 1.0).abs() > CORRELATION_TOL {
                return Err(Error::invalid(format!(
                    "diagonal entry {i} is {}, expected 1",
                    entries[(i, i)]
                )));
            }
            for j in i + 1..n {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || (a - b).abs() > CORRELATION_TOL {
                    return Err(Error::invalid(format!("entries ({i}, {j}) not symmetric")));
                }
                if a.abs() > 1.0 + CORRELATION_TOL {
                    return Err(Error::invalid(format!(
                        "entry ({i}, {j}) = {a} outside [-1, 1]"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Sample Pearson correlation of every pair of node series.
///
/// Covariances are `(t_len - 1)`-normalized; the factor cancels.
pub fn pearson_matrix(ts: &TimeSeriesSample) -> Result<CorrelationMatrix> {
    let (n, t) = (ts.n(), ts.t_len());
    if t < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {t}")));
    }
    let centered: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let x = ts.series(i);
            let mean = x.iter().sum::<f64>() / t as f64;
            x.iter().map(|v| v - mean).collect()
        })
        .collect();
    let sd: Vec<f64> = centered
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let var = x.iter().map(|v| v * v).sum::<f64>() / (t - 1) as f64;
            if var > 0.0 {
                Ok(var.sqrt())
            } else {
                Err(Error::DegenerateSeries { node: i })
            }
        })
        .collect::<Result<_>>()?;

    let mut r = DMatrix::identity(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let cov = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (t - 1) as f64;
            let v = (cov / (sd[i] * sd[j])).clamp(-1.0, 1.0);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    CorrelationMatrix::new(r)
}

/// Which value ranks node pairs when thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Largest signed correlations become edges.
    #[default]
    Signed,
    /// Largest |correlation| become edges.
    Absolute,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signed" => Ok(Self::Signed),
            "absolute" => Ok(Self::Absolute),
            other => Err(Error::invalid(format!("unknown threshold mode `{other}`"))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Signed => "signed",
            Self::Absolute => "absolute",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binarization {
    pub graph: BinaryGraph,
    pub requested_density: f64,
    /// `m / (n (n - 1) / 2)`, exactly the density of `graph`.
    pub achieved_density: f64,
    /// Set when the requested density rounds to zero edges.
    pub empty: bool,
}

/// Number of edges kept for a target density: `round(p * n (n - 1) / 2)`,
/// halves rounded away from zero.
pub fn edges_for_density(n: usize, density: f64) -> usize {
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    (density * pairs).round() as usize
}

/// Keep the `m` pairs with the largest correlation (see [`ThresholdMode`]).
///
/// Pairs with equal values are ordered by a uniformly random permutation
/// drawn from `tie_seed`: each pair, visited in lexicographic order, gets a
/// random 64-bit key and equal values sort by ascending key. The whole
/// ranking is therefore a fixed total order for a given seed, which makes
/// the edge sets nested across densities.
pub fn binarize_to_density(
    c: &CorrelationMatrix,
    density: f64,
    tie_seed: u64,
    mode: ThresholdMode,
) -> Result<Binarization> {
    let n = c.n();
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::invalid(format!("density {density} outside (0, 1]")));
    }
    let m = edges_for_density(n, density);
    let order = rank_pairs(c, tie_seed, mode);
    let graph = BinaryGraph::from_edges(n, order.into_iter().take(m))?;
    Ok(Binarization {
        achieved_density: graph.density(),
        requested_density: density,
        empty: m == 0,
        graph,
    })
}

/// All pairs `(i, j)`, `i < j`, strongest first.
pub fn rank_pairs(
    c: &CorrelationMatrix,
    tie_seed: u64,
    mode: ThresholdMode,
) -> Vec<(usize, usize)> {
    let n = c.n();
    let mut rng = rng_from_seed(tie_seed);
    let mut keyed: Vec<(f64, u64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = c.get(i, j);
            let score = match mode {
                ThresholdMode::Signed => v,
                ThresholdMode::Absolute => v.abs(),
            };
            keyed.push((score, rng.random::<u64>(), i, j));
        }
    }
    keyed.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1.cmp(&b.1))
            .then((a.2, a.3).cmp(&(b.2, b.3)))
    });
    keyed.into_iter().map(|(_, _, i, j)| (i, j)).collect()
}

/// Ordered triples `(i, j, k)` of distinct nodes with
/// `rho_ij^2 + rho_jk^2 > 1` and `rho_ik <= 0`. Every valid (positive
/// semi-definite) correlation matrix yields an empty list.
pub fn transitivity_violations(c: &CorrelationMatrix) -> Vec<(usize, usize, usize)> {
    transitivity_violations_tol(c, 0.0)
}

/// As [`transitivity_violations`], but `rho_ik` with `|rho_ik| < tol` is
/// treated as positive.
pub fn transitivity_violations_tol(c: &CorrelationMatrix, tol: f64) -> Vec<(usize, usize, usize)> {
    let n = c.n();
    let mut out = Vec::new();
    for j in 0..n {
        let sq: Vec<f64> = (0..n)
            .map(|i| if i == j { 0.0 } else { c.get(i, j).powi(2) })
            .collect();
        let best = sq.iter().copied().fold(0.0, f64::max);
        for i in 0..n {
            if i == j || sq[i] + best <= 1.0 {
                continue;
            }
            for k in 0..n {
                if k == i || k == j || sq[i] + sq[k] <= 1.0 {
                    continue;
                }
                let r = c.get(i, k);
                if r <= 0.0 && !(r.abs() < tol) {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(rows: &[&[f64]]) -> TimeSeriesSample {
        let t = rows[0].len();
        let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
        TimeSeriesSample::new(rows.len(), t, values, 0, 0).unwrap()
    }

    fn corr3(a: f64, b: f64, c: f64) -> CorrelationMatrix {
        // pairs (0,1)=a, (0,2)=b, (1,2)=c
        CorrelationMatrix::new(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, a, b, a, 1.0, c, b, c, 1.0],
        ))
        .unwrap()
    }

    #[test]
    fn pearson_examples() {
        let x = [0.3, -1.0, 2.5, 0.7, 1.1];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = pearson_matrix(&ts(&[&x, &x])).unwrap();
        assert!((c.get(0, 1) - 1.0).abs() < 1e-15);
        let c = pearson_matrix(&ts(&[&x, &neg])).unwrap();
        assert!((c.get(0, 1) + 1.0).abs() < 1e-15);
        let c = pearson_matrix(&ts(&[&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 4.0, 3.0]])).unwrap();
        assert!((c.get(0, 1) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pearson_names_flat_node() {
        let err = pearson_matrix(&ts(&[&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]])).unwrap_err();
        assert!(matches!(err, Error::DegenerateSeries { node: 1 }));
        assert!(pearson_matrix(&ts(&[&[1.0, 2.0], &[2.0, 1.0]])).is_err());
    }

    #[test]
    fn rejects_invalid_correlation() {
        assert!(
            CorrelationMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0])).is_err()
        );
        assert!(
            CorrelationMatrix::new(DMatrix::from_row_slice(2, 2, &[0.9, 0.5, 0.5, 1.0])).is_err()
        );
        assert!(
            CorrelationMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.5, 1.5, 1.0])).is_err()
        );
    }

    #[test]
    fn binarize_picks_top_pair() {
        let c = corr3(0.9, 0.5, 0.2);
        // m = round(p * 3) = 1
        let b = binarize_to_density(&c, 0.3, 0, ThresholdMode::Signed).unwrap();
        assert_eq!(b.graph.edges(), vec![(0, 1)]);
        assert!((b.achieved_density - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.requested_density, 0.3);
    }

    #[test]
    fn binarize_full_density_is_complete() {
        let c = corr3(0.9, -0.5, 0.2);
        let b = binarize_to_density(&c, 1.0, 4, ThresholdMode::Signed).unwrap();
        assert_eq!(b.graph, BinaryGraph::complete(3));
    }

    #[test]
    fn binarize_ties_are_seeded() {
        let c = corr3(0.4, 0.4, 0.4);
        let picks: Vec<_> = (0..32)
            .map(|seed| {
                let b = binarize_to_density(&c, 2.0 / 3.0, seed, ThresholdMode::Signed).unwrap();
                assert_eq!(b.graph.edge_count(), 2);
                assert_eq!(
                    b,
                    binarize_to_density(&c, 2.0 / 3.0, seed, ThresholdMode::Signed).unwrap()
                );
                b.graph.edges()
            })
            .collect();
        // the tie rule must not always drop the same pair
        assert!(picks.iter().any(|p| p != &picks[0]));
    }

    #[test]
    fn binarize_empty_flag_and_errors() {
        let c = corr3(0.9, 0.5, 0.2);
        let b = binarize_to_density(&c, 0.1, 0, ThresholdMode::Signed).unwrap();
        assert!(b.empty);
        assert_eq!(b.graph.edge_count(), 0);
        assert!(binarize_to_density(&c, 0.0, 0, ThresholdMode::Signed).is_err());
        assert!(binarize_to_density(&c, 1.2, 0, ThresholdMode::Signed).is_err());
    }

    #[test]
    fn absolute_mode_uses_magnitude() {
        let c = corr3(0.3, -0.9, 0.2);
        let signed = binarize_to_density(&c, 0.3, 0, ThresholdMode::Signed).unwrap();
        let abs = binarize_to_density(&c, 0.3, 0, ThresholdMode::Absolute).unwrap();
        assert_eq!(signed.graph.edges(), vec![(0, 1)]);
        assert_eq!(abs.graph.edges(), vec![(0, 2)]);
    }

    #[test]
    fn half_edges_round_away_from_zero() {
        assert_eq!(edges_for_density(4, 0.25), 2); // 1.5 -> 2
        assert_eq!(edges_for_density(4, 1.0 / 12.0), 1); // 0.5 -> 1
        assert_eq!(edges_for_density(5, 0.1), 1);
    }

    #[test]
    fn transitivity_examples() {
        assert!(
            transitivity_violations(&CorrelationMatrix::new(DMatrix::identity(4, 4)).unwrap())
                .is_empty()
        );
        // not PSD: 0.81 + 0.81 > 1 with a negative third correlation
        let c = corr3(0.9, -0.5, 0.9);
        let v = transitivity_violations(&c);
        // i=0, j=1, k=2: rho_01 = 0.9, rho_12 = 0.9, rho_02 = -0.5
        assert!(v.contains(&(0, 1, 2)));
        assert!(v.contains(&(2, 1, 0)));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn transitivity_tolerance() {
        let c = corr3(0.9, -1e-12, 0.9);
        assert_eq!(transitivity_violations(&c).len(), 2);
        assert!(transitivity_violations_tol(&c, 1e-10).is_empty());
    }
}
