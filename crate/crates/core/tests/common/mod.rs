//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use fcsw_core::graph::BinaryGraph;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

pub fn jacobi_spectral_radius(m: &DMatrix<f64>) -> f64 {
    jacobi_eigenvalues(m)
        .into_iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

/// All-pairs hop distances; `None` when unreachable.
pub fn floyd_warshall(g: &BinaryGraph) -> Vec<Vec<Option<u32>>> {
    let n = g.n();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, j) in g.edges() {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|v| (v < inf).then_some(v)).collect())
        .collect()
}

/// Local clustering by enumerating every node triple (i, j, k).
pub fn triple_loop_local_clustering(g: &BinaryGraph) -> Vec<f64> {
    let n = g.n();
    (0..n)
        .map(|i| {
            let k = (0..n).filter(|&j| j != i && g.has_edge(i, j)).count();
            if k < 2 {
                return 0.0;
            }
            let mut linked = 0usize;
            for j in 0..n {
                for l in j + 1..n {
                    if j != i && l != i && g.has_edge(i, j) && g.has_edge(i, l) && g.has_edge(j, l) {
                        linked += 1;
                    }
                }
            }
            linked as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

/// Number of the 2^n equally likely sign patterns with exactly k positives,
/// by enumerating every pattern.
pub fn enumerated_binomial_counts(n: u32) -> Vec<u64> {
    let mut counts = vec![0u64; n as usize + 1];
    for pattern in 0u64..(1u64 << n) {
        counts[pattern.count_ones() as usize] += 1;
    }
    counts
}

/// Two-sided sign-test p-value from enumerated pattern counts.
pub fn enumerated_sign_test(counts: &[u64], above: usize) -> f64 {
    let lower: u64 = counts[..=above].iter().sum();
    let upper: u64 = counts[above..].iter().sum();
    let total: u64 = counts.iter().sum();
    (2.0 * lower.min(upper) as f64 / total as f64).min(1.0)
}

/// Uniformly random graph of a random density, for oracle comparisons.
pub fn random_graph(n: usize, p: f64, seed: u64) -> BinaryGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    BinaryGraph::from_edges(n, edges).unwrap()
}
