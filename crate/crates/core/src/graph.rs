//! Unweighted undirected graphs and the metrics used for small-world analysis.
//!
//! Clustering follows the Watts–Strogatz node average: nodes of degree 0 or 1
//! contribute zero. Average path length is the mean shortest-path hop count
//! over pairs joined by some path; for a graph without edges it is undefined
//! (`None`), never 0 or infinity.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    n: usize,
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl BinaryGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            neighbors: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Self {
            n,
            neighbors,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Build from unordered pairs. Rejects self-loops, duplicates (in either
    /// orientation) and out-of-range indices.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut neighbors = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on node {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
            edge_count += 1;
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!(
                    "duplicate edge ({}, {})",
                    i.min(w[0]),
                    i.max(w[0])
                )));
            }
        }
        Ok(Self {
            n,
            neighbors,
            edge_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, list) in self.neighbors.iter().enumerate() {
            out.extend(list.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    pub fn possible_edges(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn density(&self) -> f64 {
        match self.possible_edges() {
            0 => 0.0,
            p => self.edge_count as f64 / p as f64,
        }
    }

    /// Same graph with node `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::invalid("permutation length differs from n"));
        }
        Self::from_edges(
            self.n,
            self.edges().into_iter().map(|(i, j)| (perm[i], perm[j])),
        )
    }
}

/// How pairs without a connecting path enter the average path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathConvention {
    /// Mean over all pairs with a finite distance.
    #[default]
    FinitePairs,
    /// Mean over pairs inside the largest connected component.
    LargestComponent,
}

impl std::str::FromStr for PathConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite_pairs" => Ok(Self::FinitePairs),
            "largest_component" => Ok(Self::LargestComponent),
            other => Err(Error::invalid(format!("unknown path convention `{other}`"))),
        }
    }
}

impl std::fmt::Display for PathConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::FinitePairs => "finite_pairs",
            Self::LargestComponent => "largest_component",
        })
    }
}

pub fn degrees(g: &BinaryGraph) -> Vec<usize> {
    (0..g.n()).map(|i| g.degree(i)).collect()
}

/// Twice the number of triangles through `i`, i.e. the number of ordered
/// neighbor pairs `(j, l)` of `i` that are themselves adjacent.
fn ordered_closed_pairs(g: &BinaryGraph, i: usize, mark: &mut [bool]) -> usize {
    let nbrs = g.neighbors(i);
    for &j in nbrs {
        mark[j] = true;
    }
    let mut closed = 0;
    for &j in nbrs {
        closed += g.neighbors(j).iter().filter(|&&l| mark[l]).count();
    }
    for &j in nbrs {
        mark[j] = false;
    }
    closed
}

fn local_coefficient(closed: usize, k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        closed as f64 / (k * (k - 1)) as f64
    }
}

pub fn local_clustering(g: &BinaryGraph, i: usize) -> Result<f64> {
    if i >= g.n() {
        return Err(Error::invalid(format!(
            "node {i} out of range for n = {}",
            g.n()
        )));
    }
    let mut mark = vec![false; g.n()];
    let closed = ordered_closed_pairs(g, i, &mut mark);
    Ok(local_coefficient(closed, g.degree(i)))
}

/// All local clustering coefficients, in node order.
pub fn local_clustering_all(g: &BinaryGraph) -> Vec<f64> {
    let mut mark = vec![false; g.n()];
    (0..g.n())
        .map(|i| local_coefficient(ordered_closed_pairs(g, i, &mut mark), g.degree(i)))
        .collect()
}

/// Mean of a set of values summed in sorted order, so the result does not
/// depend on node labelling.
pub(crate) fn order_free_mean(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let len = values.len() as f64;
    values.into_iter().sum::<f64>() / len
}

/// Global clustering coefficient: the mean of the local coefficients over
/// all nodes, zeros included.
pub fn clustering(g: &BinaryGraph) -> f64 {
    order_free_mean(local_clustering_all(g))
}

/// Dense all-pairs hop-count matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    hops: Vec<u32>,
}

impl DistanceMatrix {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn n(&self) -> usize {
        self.n
    }

    /// `None` when no path joins `i` and `j`.
    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match self.hops[i * self.n + j] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn raw(&self) -> &[u32] {
        &self.hops
    }
}

fn bfs(g: &BinaryGraph, source: usize, dist: &mut [u32], queue: &mut VecDeque<usize>) {
    dist.fill(DistanceMatrix::UNREACHABLE);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1;
        for &v in g.neighbors(u) {
            if dist[v] == DistanceMatrix::UNREACHABLE {
                dist[v] = next;
                queue.push_back(v);
            }
        }
    }
}

pub fn shortest_path_lengths(g: &BinaryGraph) -> DistanceMatrix {
    let n = g.n();
    let mut hops = vec![DistanceMatrix::UNREACHABLE; n * n];
    let mut queue = VecDeque::with_capacity(n);
    for (s, row) in hops.chunks_mut(n.max(1)).enumerate().take(n) {
        bfs(g, s, row, &mut queue);
    }
    DistanceMatrix { n, hops }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLengthSummary {
    /// Mean hop count; `None` when no pair is joined by a path.
    pub mean: Option<f64>,
    /// Fraction of node pairs joined by a path.
    pub finite_pair_fraction: f64,
}

/// Mean over reachable ordered pairs `i != j`. Summing over unordered pairs
/// gives the same value; both counts are kept as integers so the result is
/// exact up to the final division.
pub fn avg_path_length(g: &BinaryGraph) -> PathLengthSummary {
    avg_path_length_with(g, PathConvention::FinitePairs)
}

pub fn avg_path_length_with(g: &BinaryGraph, convention: PathConvention) -> PathLengthSummary {
    let n = g.n();
    let all_pairs = (n * n.saturating_sub(1)) as u64;
    let components = connected_components(g);
    let restrict = match convention {
        PathConvention::FinitePairs => None,
        PathConvention::LargestComponent => Some(components.largest()),
    };

    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::with_capacity(n);
    let (mut sum, mut count, mut finite) = (0u64, 0u64, 0u64);
    for s in 0..n {
        bfs(g, s, &mut dist, &mut queue);
        let in_scope = restrict.is_none_or(|c| components.labels[s] == c);
        for (t, &d) in dist.iter().enumerate() {
            if t == s || d == DistanceMatrix::UNREACHABLE {
                continue;
            }
            finite += 1;
            if in_scope {
                sum += u64::from(d);
                count += 1;
            }
        }
    }
    PathLengthSummary {
        mean: (count > 0).then(|| sum as f64 / count as f64),
        finite_pair_fraction: if all_pairs == 0 {
            1.0
        } else {
            finite as f64 / all_pairs as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component label per node; labels are assigned in order of each
    /// component's smallest node.
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Label of the largest component (lowest label on ties).
    pub fn largest(&self) -> usize {
        let sizes = self.sizes();
        let mut best = 0;
        for (l, &s) in sizes.iter().enumerate() {
            if s > sizes[best] {
                best = l;
            }
        }
        best
    }
}

pub fn connected_components(g: &BinaryGraph) -> Components {
    let n = g.n();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for root in 0..n {
        if labels[root] != usize::MAX {
            continue;
        }
        labels[root] = count;
        stack.push(root);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if labels[v] == usize::MAX {
                    labels[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    Components { labels, count }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub clustering: f64,
    pub avg_path_length: Option<f64>,
    pub density: f64,
    pub edge_count: usize,
    pub n_components: usize,
    pub finite_pair_fraction: f64,
    pub degree_sequence: Vec<usize>,
}

pub fn metrics(g: &BinaryGraph) -> GraphMetrics {
    metrics_with(g, PathConvention::FinitePairs)
}

pub fn metrics_with(g: &BinaryGraph, convention: PathConvention) -> GraphMetrics {
    let paths = avg_path_length_with(g, convention);
    GraphMetrics {
        clustering: clustering(g),
        avg_path_length: paths.mean,
        density: g.density(),
        edge_count: g.edge_count(),
        n_components: connected_components(g).count,
        finite_pair_fraction: paths.finite_pair_fraction,
        degree_sequence: degrees(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> BinaryGraph {
        BinaryGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn star4() -> BinaryGraph {
        graph(4, &[(0, 1), (0, 2), (0, 3)])
    }

    fn triangle_pendant() -> BinaryGraph {
        graph(4, &[(0, 1), (1, 2), (0, 2), (0, 3)])
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(BinaryGraph::from_edges(3, [(0, 0)]).is_err());
        assert!(BinaryGraph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(BinaryGraph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degrees(&BinaryGraph::empty(4)), vec![0, 0, 0, 0]);
        assert_eq!(degrees(&BinaryGraph::complete(4)), vec![3, 3, 3, 3]);
        assert_eq!(degrees(&star4()), vec![3, 1, 1, 1]);
    }

    #[test]
    fn local_clustering_examples() {
        let k3 = BinaryGraph::complete(3);
        for i in 0..3 {
            assert_eq!(local_clustering(&k3, i).unwrap(), 1.0);
        }
        assert_eq!(local_clustering(&star4(), 0).unwrap(), 0.0);
        assert_eq!(local_clustering(&triangle_pendant(), 0).unwrap(), 1.0 / 3.0);
        assert!(local_clustering(&k3, 3).is_err());
    }

    #[test]
    fn global_clustering_examples() {
        assert_eq!(clustering(&BinaryGraph::complete(6)), 1.0);
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(clustering(&c5), 0.0);
        assert!((clustering(&triangle_pendant()) - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let path = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(shortest_path_lengths(&path).get(0, 2), Some(2));
        let two_edges = graph(4, &[(0, 1), (2, 3)]);
        let d = shortest_path_lengths(&two_edges);
        assert_eq!(d.get(0, 2), None);
        assert_eq!(d.get(2, 2), Some(0));
    }

    #[test]
    fn avg_path_examples() {
        assert_eq!(avg_path_length(&BinaryGraph::complete(5)).mean, Some(1.0));
        assert_eq!(avg_path_length(&star4()).mean, Some(1.5));
        let empty = avg_path_length(&BinaryGraph::empty(4));
        assert_eq!(empty.mean, None);
        assert_eq!(empty.finite_pair_fraction, 0.0);
    }

    #[test]
    fn largest_component_convention() {
        // path of 3 plus a separate edge
        let g = graph(5, &[(0, 1), (1, 2), (3, 4)]);
        let finite = avg_path_length(&g);
        // ordered pairs: path gives 1,1,2 twice -> 8 over 6; edge gives 1 twice
        assert_eq!(finite.mean, Some(10.0 / 8.0));
        assert_eq!(finite.finite_pair_fraction, 8.0 / 20.0);
        let largest = avg_path_length_with(&g, PathConvention::LargestComponent);
        assert_eq!(largest.mean, Some(8.0 / 6.0));
    }

    #[test]
    fn component_examples() {
        assert_eq!(connected_components(&BinaryGraph::complete(5)).count, 1);
        assert_eq!(connected_components(&BinaryGraph::empty(5)).count, 5);
        let two_triangles = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let c = connected_components(&two_triangles);
        assert_eq!(c.count, 2);
        assert_eq!(c.sizes(), vec![3, 3]);
    }

    #[test]
    fn metrics_examples() {
        let k4 = metrics(&BinaryGraph::complete(4));
        assert_eq!(k4.clustering, 1.0);
        assert_eq!(k4.avg_path_length, Some(1.0));
        assert_eq!(k4.density, 1.0);
        assert_eq!(k4.n_components, 1);

        // unordered distances {1,1,1,1,2,2}: 8 ordered pairs at 1, 4 at 2
        let tp = metrics(&triangle_pendant());
        assert!((tp.clustering - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(tp.avg_path_length, Some(16.0 / 12.0));

        let e = metrics(&BinaryGraph::empty(3));
        assert_eq!(e.clustering, 0.0);
        assert_eq!(e.avg_path_length, None);
        assert_eq!(e.finite_pair_fraction, 0.0);
    }
}
