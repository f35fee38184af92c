//! Random reference graphs and the relative small-world indices.
//!
//! `gamma = C / C_null`, `lambda = L / L_null`, `sigma = gamma / lambda`.
//! An index is `None` whenever its ratio is not defined: the null graph has
//! zero clustering, or either path length is undefined.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{metrics, BinaryGraph, GraphMetrics};
use crate::rng::{rng_from_seed, Rng};

/// Default number of successful swaps per edge for Maslov–Sneppen rewiring.
pub const DEFAULT_SWAP_FACTOR: f64 = 10.0;

/// Attempts allowed per required swap before rewiring gives up.
pub const ATTEMPTS_PER_SWAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullModel {
    /// Uniform over graphs with the same node and edge count.
    #[default]
    Er,
    /// G(n, p) with p equal to the observed density.
    ErGnp,
    /// Degree-preserving double-edge-swap randomization.
    MaslovSneppen,
}

impl FromStr for NullModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "er" => Ok(Self::Er),
            "er_gnp" => Ok(Self::ErGnp),
            "maslov_sneppen" | "ms" => Ok(Self::MaslovSneppen),
            other => Err(Error::invalid(format!(
                "unknown null model `{other}` (expected er, er_gnp or maslov_sneppen)"
            ))),
        }
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Er => "er",
            Self::ErGnp => "er_gnp",
            Self::MaslovSneppen => "maslov_sneppen",
        })
    }
}

/// Decode sorted linear pair indices into `(i, j)`, `i < j`, in
/// lexicographic pair order.
fn decode_pairs(n: usize, mut sorted: Vec<usize>) -> Vec<(usize, usize)> {
    sorted.sort_unstable();
    let mut out = Vec::with_capacity(sorted.len());
    let (mut row, mut row_start) = (0usize, 0usize);
    for k in sorted {
        while k >= row_start + (n - 1 - row) {
            row_start += n - 1 - row;
            row += 1;
        }
        out.push((row, row + 1 + (k - row_start)));
    }
    out
}

/// Uniform random graph with the same `n` and exactly the same edge count.
pub fn er_matched(g: &BinaryGraph, seed: u64) -> BinaryGraph {
    let n = g.n();
    let pairs = g.possible_edges();
    let mut rng = rng_from_seed(seed);
    let picked = index::sample(&mut rng, pairs, g.edge_count()).into_vec();
    BinaryGraph::from_edges(n, decode_pairs(n, picked)).expect("sampled pairs are distinct")
}

/// G(n, p) draw at the observed density of `g`; edge count varies.
pub fn er_gnp(g: &BinaryGraph, seed: u64) -> BinaryGraph {
    let n = g.n();
    let p = g.density();
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    BinaryGraph::from_edges(n, edges).expect("generated edges are valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rewiring {
    pub graph: BinaryGraph,
    pub swaps_requested: usize,
    pub swaps_performed: usize,
    pub attempts: usize,
    /// The attempt cap ran out before all requested swaps were made.
    pub partial: bool,
}

struct AdjacencyBits {
    n: usize,
    words: Vec<u64>,
}

impl AdjacencyBits {
    fn new(n: usize) -> Self {
        Self {
            n,
            words: vec![0; (n * n).div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize, j: usize, on: bool) {
        for k in [i * self.n + j, j * self.n + i] {
            let (w, b) = (k / 64, k % 64);
            if on {
                self.words[w] |= 1 << b;
            } else {
                self.words[w] &= !(1 << b);
            }
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        let k = i * self.n + j;
        self.words[k / 64] >> (k % 64) & 1 == 1
    }
}

fn try_swap(edges: &mut [(usize, usize)], adj: &mut AdjacencyBits, rng: &mut Rng) -> bool {
    let m = edges.len();
    let e1 = rng.random_range(0..m);
    let e2 = rng.random_range(0..m);
    if e1 == e2 {
        return false;
    }
    let (a, b) = edges[e1];
    let (mut c, mut d) = edges[e2];
    // orient the second edge at random so both rewirings are reachable
    if rng.random::<bool>() {
        std::mem::swap(&mut c, &mut d);
    }
    if a == c || a == d || b == c || b == d {
        return false;
    }
    // {a,b},{c,d} -> {a,d},{c,b}
    if adj.get(a, d) || adj.get(c, b) {
        return false;
    }
    adj.set(a, b, false);
    adj.set(c, d, false);
    adj.set(a, d, true);
    adj.set(c, b, true);
    edges[e1] = (a.min(d), a.max(d));
    edges[e2] = (c.min(b), c.max(b));
    true
}

/// Maslov–Sneppen randomization: `ceil(swap_factor * |E|)` successful
/// double-edge swaps, each replacing `{a,b},{c,d}` (four distinct nodes)
/// with `{a,d},{c,b}` when neither new edge exists. Every node keeps its
/// degree.
///
/// At most `100` attempts per required swap are made; if they run out the
/// result is returned with `partial` set.
pub fn maslov_sneppen(g: &BinaryGraph, swap_factor: f64, seed: u64) -> Result<Rewiring> {
    if !(swap_factor > 0.0 && swap_factor.is_finite()) {
        return Err(Error::invalid(format!(
            "swap factor {swap_factor} must be positive"
        )));
    }
    if g.edge_count() < 2 {
        return Err(Error::invalid(format!(
            "degree-preserving rewiring needs at least 2 edges, got {}",
            g.edge_count()
        )));
    }
    let n = g.n();
    let mut edges = g.edges();
    let mut adj = AdjacencyBits::new(n);
    for &(i, j) in &edges {
        adj.set(i, j, true);
    }
    let required = (swap_factor * edges.len() as f64).ceil() as usize;
    let cap = required.saturating_mul(ATTEMPTS_PER_SWAP);
    let mut rng = rng_from_seed(seed);
    let (mut done, mut attempts) = (0, 0);
    while done < required && attempts < cap {
        attempts += 1;
        if try_swap(&mut edges, &mut adj, &mut rng) {
            done += 1;
        }
    }
    Ok(Rewiring {
        graph: BinaryGraph::from_edges(n, edges)?,
        swaps_requested: required,
        swaps_performed: done,
        attempts,
        partial: done < required,
    })
}

/// A drawn null graph plus rewiring diagnostics where applicable.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDraw {
    pub graph: BinaryGraph,
    pub rewiring: Option<(usize, bool)>,
}

pub fn draw_null(
    g: &BinaryGraph,
    model: NullModel,
    swap_factor: f64,
    seed: u64,
) -> Result<NullDraw> {
    Ok(match model {
        NullModel::Er => NullDraw {
            graph: er_matched(g, seed),
            rewiring: None,
        },
        NullModel::ErGnp => NullDraw {
            graph: er_gnp(g, seed),
            rewiring: None,
        },
        NullModel::MaslovSneppen => {
            let r = maslov_sneppen(g, swap_factor, seed)?;
            NullDraw {
                graph: r.graph,
                rewiring: Some((r.swaps_performed, r.partial)),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallWorldIndices {
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub null_model: NullModel,
    pub null_seed: u64,
}

impl SmallWorldIndices {
    /// Indices from raw clustering and path-length values.
    pub fn from_measures(
        clustering: f64,
        path_length: Option<f64>,
        null_clustering: f64,
        null_path_length: Option<f64>,
        null_model: NullModel,
        null_seed: u64,
    ) -> Self {
        let gamma = (null_clustering > 0.0).then(|| clustering / null_clustering);
        let lambda = match (path_length, null_path_length) {
            (Some(l), Some(ln)) if ln > 0.0 => Some(l / ln),
            _ => None,
        };
        let sigma = match (gamma, lambda) {
            (Some(g), Some(l)) if l > 0.0 => Some(g / l),
            _ => None,
        };
        Self {
            gamma,
            lambda,
            sigma,
            null_model,
            null_seed,
        }
    }

    pub fn from_metrics(
        g: &GraphMetrics,
        null: &GraphMetrics,
        null_model: NullModel,
        null_seed: u64,
    ) -> Self {
        Self::from_measures(
            g.clustering,
            g.avg_path_length,
            null.clustering,
            null.avg_path_length,
            null_model,
            null_seed,
        )
    }

    /// Flat `key=value` record; undefined indices print as `undefined`.
    pub fn to_record(&self) -> String {
        format!(
            "gamma={} lambda={} sigma={} null_model={} null_seed={}",
            fmt_index(self.gamma),
            fmt_index(self.lambda),
            fmt_index(self.sigma),
            self.null_model,
            self.null_seed
        )
    }
}

fn fmt_index(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

/// Relative indices of `g` against one null graph `null`.
pub fn small_world(
    g: &BinaryGraph,
    null: &BinaryGraph,
    null_model: NullModel,
    null_seed: u64,
) -> Result<SmallWorldIndices> {
    if g.n() != null.n() {
        return Err(Error::invalid(format!(
            "graph has {} nodes but null graph has {}",
            g.n(),
            null.n()
        )));
    }
    Ok(SmallWorldIndices::from_metrics(
        &metrics(g),
        &metrics(null),
        null_model,
        null_seed,
    ))
}

/// Average the reference measures over several null graphs: clustering
/// over all draws, path length over draws where it is defined.
pub fn average_null_measures(nulls: &[GraphMetrics]) -> (f64, Option<f64>) {
    let c = nulls.iter().map(|m| m.clustering).sum::<f64>() / nulls.len().max(1) as f64;
    let defined: Vec<f64> = nulls.iter().filter_map(|m| m.avg_path_length).collect();
    let l = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    (c, l)
}
