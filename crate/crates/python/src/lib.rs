//! Python module `fcsw`: graphs, the AR(1) model, binarization, null models,
//! small-world indices, statistics and single sweep cells.
//!
//! Matrices cross the boundary as lists of rows.

use fcsw_core::error::Error;
use fcsw_core::fc::{self, CorrelationMatrix, ThresholdMode};
use fcsw_core::graph::{self, BinaryGraph};
use fcsw_core::model::{self, CouplingMatrix, StructuralGraph, TimeSeriesSample};
use fcsw_core::nullmodels::{self, NullModel};
use fcsw_core::sweep::{self, CellParams, PipelineOptions, SimulationMode};
use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Usage(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(PyValueError::new_err(format!(
            "row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(to_py)
}

/// Undirected simple graph on nodes `0..n`.
#[pyclass(frozen, module = "fcsw")]
struct Graph {
    inner: BinaryGraph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (n, edges=Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        BinaryGraph::from_edges(n, edges)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Graph from a 0/1 symmetric adjacency matrix.
    #[staticmethod]
    fn from_adjacency(adjacency: Vec<Vec<f64>>) -> PyResult<Self> {
        fcsw_core::textio::graph_from_matrix(&matrix(&adjacency)?)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    #[getter]
    fn density(&self) -> f64 {
        self.inner.density()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.inner.n() && j < self.inner.n() && self.inner.has_edge(i, j)
    }

    fn degrees(&self) -> Vec<usize> {
        graph::degrees(&self.inner)
    }

    fn adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.inner.n();
        rows(&DMatrix::from_fn(n, n, |i, j| {
            if self.inner.has_edge(i, j) { 1.0 } else { 0.0 }
        }))
    }

    fn clustering(&self) -> f64 {
        graph::clustering(&self.inner)
    }

    fn local_clustering(&self) -> Vec<f64> {
        graph::local_clustering_all(&self.inner)
    }

    /// Mean shortest-path length over connected pairs; `None` if no pair is connected.
    fn avg_path_length(&self) -> Option<f64> {
        graph::avg_path_length(&self.inner).mean
    }

    /// Hop distances; `None` for unreachable pairs.
    fn distances(&self) -> Vec<Vec<Option<u32>>> {
        let d = graph::shortest_path_lengths(&self.inner);
        let n = self.inner.n();
        (0..n).map(|i| (0..n).map(|j| d.get(i, j)).collect()).collect()
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = graph::metrics(&self.inner);
        let d = PyDict::new(py);
        d.set_item("clustering", m.clustering)?;
        d.set_item("avg_path_length", m.avg_path_length)?;
        d.set_item("density", m.density)?;
        d.set_item("edge_count", m.edge_count)?;
        d.set_item("n_components", m.n_components)?;
        d.set_item("finite_pair_fraction", m.finite_pair_fraction)?;
        Ok(d)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Coupling matrix `s (SC + alpha I) / lambda_max`.
#[pyclass(frozen, module = "fcsw")]
struct Coupling {
    inner: CouplingMatrix,
}

#[pymethods]
impl Coupling {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn s(&self) -> f64 {
        self.inner.s()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn lambda_max(&self) -> f64 {
        self.inner.lambda_max()
    }

    fn entries(&self) -> Vec<Vec<f64>> {
        rows(self.inner.entries())
    }

    fn spectral_radius(&self) -> PyResult<f64> {
        model::spectral_radius(self.inner.entries(), model::SPECTRAL_TOL).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Coupling(n={}, s={}, alpha={}, lambda_max={})",
            self.inner.n(),
            self.inner.s(),
            self.inner.alpha(),
            self.inner.lambda_max()
        )
    }
}

#[pyfunction]
fn generate_er(n: usize, p: f64, seed: u64) -> PyResult<Graph> {
    model::generate_er(n, p, seed)
        .map(|sc| Graph { inner: sc.topology().clone() })
        .map_err(to_py)
}

#[pyfunction]
fn coupling(sc: &Graph, s: f64, alpha: f64) -> PyResult<Coupling> {
    model::build_coupling(&StructuralGraph::from_topology(sc.inner.clone()), s, alpha)
        .map(|inner| Coupling { inner })
        .map_err(to_py)
}

#[pyfunction]
fn asymptotic_covariance(a: &Coupling) -> PyResult<Vec<Vec<f64>>> {
    model::asymptotic_covariance(&a.inner)
        .map(|c| rows(c.entries()))
        .map_err(to_py)
}

/// Exact stationary correlation matrix of the process driven by `a`.
#[pyfunction]
fn asymptotic_correlation(a: &Coupling) -> PyResult<Vec<Vec<f64>>> {
    let cov = model::asymptotic_covariance(&a.inner).map_err(to_py)?;
    model::cov_to_corr(&cov)
        .map(|c| rows(c.entries()))
        .map_err(to_py)
}

/// AR(1) sample: one row of `t_len` values per node.
#[pyfunction]
#[pyo3(signature = (a, t_len, seed, burn_in=None))]
fn simulate(a: &Coupling, t_len: usize, seed: u64, burn_in: Option<usize>) -> PyResult<Vec<Vec<f64>>> {
    let burn_in = burn_in.unwrap_or_else(|| model::default_burn_in(a.inner.s()));
    let ts = model::simulate_ar1(&a.inner, t_len, burn_in, seed).map_err(to_py)?;
    Ok((0..ts.n()).map(|i| ts.series(i).to_vec()).collect())
}

/// Pearson correlation of the rows of `series`.
#[pyfunction]
fn pearson(series: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let n = series.len();
    let t_len = series.first().map_or(0, Vec::len);
    if series.iter().any(|s| s.len() != t_len) {
        return Err(PyValueError::new_err("all series must have the same length"));
    }
    let ts = TimeSeriesSample::new(n, t_len, series.concat(), 0, 0).map_err(to_py)?;
    fc::pearson_matrix(&ts)
        .map(|c| rows(c.entries()))
        .map_err(to_py)
}

/// Keep the strongest pairs of `correlation` up to `density`.
#[pyfunction]
#[pyo3(signature = (correlation, density, tie_seed=0, threshold="signed"))]
fn binarize(correlation: Vec<Vec<f64>>, density: f64, tie_seed: u64, threshold: &str) -> PyResult<Graph> {
    let c = CorrelationMatrix::new(matrix(&correlation)?).map_err(to_py)?;
    let mode: ThresholdMode = parse(threshold)?;
    fc::binarize_to_density(&c, density, tie_seed, mode)
        .map(|b| Graph { inner: b.graph })
        .map_err(to_py)
}

/// Triples `(i, j, k)` where `rho_ij^2 + rho_jk^2 > 1` but `rho_ik <= 0`.
#[pyfunction]
#[pyo3(signature = (correlation, tol=1e-10))]
fn transitivity_violations(correlation: Vec<Vec<f64>>, tol: f64) -> PyResult<Vec<(usize, usize, usize)>> {
    let c = CorrelationMatrix::new(matrix(&correlation)?).map_err(to_py)?;
    Ok(fc::transitivity_violations_tol(&c, tol))
}

/// Null graph for `g`: "er", "er_gnp" or "maslov_sneppen".
#[pyfunction]
#[pyo3(signature = (g, seed, model="er", swap_factor=10.0))]
fn null_graph(g: &Graph, seed: u64, model: &str, swap_factor: f64) -> PyResult<Graph> {
    let model: NullModel = parse(model)?;
    nullmodels::draw_null(&g.inner, model, swap_factor, seed)
        .map(|d| Graph { inner: d.graph })
        .map_err(to_py)
}

/// gamma, lambda and sigma of `g` against `null`; undefined values are `None`.
#[pyfunction]
fn small_world<'py>(py: Python<'py>, g: &Graph, null: &Graph) -> PyResult<Bound<'py, PyDict>> {
    let sw = nullmodels::small_world(&g.inner, &null.inner, NullModel::Er, 0).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("gamma", sw.gamma)?;
    d.set_item("lambda", sw.lambda)?;
    d.set_item("sigma", sw.sigma)?;
    Ok(d)
}

/// Exact two-sided sign test: `(p_value, above, below)`.
#[pyfunction]
#[pyo3(signature = (values, reference=1.0))]
fn sign_test(values: Vec<f64>, reference: f64) -> Option<(f64, usize, usize)> {
    sweep::sign_test(&values, reference).map(|r| (r.p_value, r.above, r.below))
}

/// Two-sided one-sample t-test: `(t, df, p_value)`.
#[pyfunction]
#[pyo3(signature = (values, reference=1.0))]
fn t_test(values: Vec<f64>, reference: f64) -> Option<(f64, f64, f64)> {
    sweep::t_test_one_sample(&values, reference).map(|r| (r.t, r.df, r.p_value))
}

#[pyfunction]
fn default_density_grid() -> Vec<f64> {
    sweep::default_density_grid()
}

/// One realization of one sweep cell, as a dict of the record's fields.
#[pyfunction]
#[pyo3(signature = (
    n, s, alpha, p_sc, p_fc, realization, master_seed,
    null_model="er", t_len=None, burn_in=None
))]
#[allow(clippy::too_many_arguments)]
fn run_cell<'py>(
    py: Python<'py>,
    n: usize,
    s: f64,
    alpha: f64,
    p_sc: f64,
    p_fc: f64,
    realization: usize,
    master_seed: u64,
    null_model: &str,
    t_len: Option<usize>,
    burn_in: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = CellParams { n, s, alpha, p_sc, p_fc };
    let options = PipelineOptions {
        null_model: parse(null_model)?,
        mode: match t_len {
            None => SimulationMode::Asymptotic,
            Some(t_len) => SimulationMode::Finite { t_len, burn_in },
        },
        ..Default::default()
    };
    let r = sweep::run_cell(&params, realization, master_seed, &options).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("status", r.status.as_str())?;
    d.set_item("sc_edges", r.sc_edges)?;
    d.set_item("fc_edges", r.fc_edges)?;
    d.set_item("n_components", r.n_components)?;
    d.set_item("clustering", r.clustering)?;
    d.set_item("path_length", r.path_length)?;
    d.set_item("null_clustering", r.null_clustering)?;
    d.set_item("null_path_length", r.null_path_length)?;
    d.set_item("gamma", r.gamma)?;
    d.set_item("lambda", r.lambda)?;
    d.set_item("sigma", r.sigma)?;
    Ok(d)
}

#[pymodule]
fn fcsw(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Graph>()?;
    m.add_class::<Coupling>()?;
    m.add_function(wrap_pyfunction!(generate_er, m)?)?;
    m.add_function(wrap_pyfunction!(coupling, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(binarize, m)?)?;
    m.add_function(wrap_pyfunction!(transitivity_violations, m)?)?;
    m.add_function(wrap_pyfunction!(null_graph, m)?)?;
    m.add_function(wrap_pyfunction!(small_world, m)?)?;
    m.add_function(wrap_pyfunction!(sign_test, m)?)?;
    m.add_function(wrap_pyfunction!(t_test, m)?)?;
    m.add_function(wrap_pyfunction!(default_density_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_cell, m)?)?;
    Ok(())
}
