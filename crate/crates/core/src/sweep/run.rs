use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{PipelineOptions, SimulationMode, SweepConfig};
use super::stats::{sign_test, summarize, t_test_one_sample, IndexSummary};
use crate::error::{Error, Result};
use crate::fc::{binarize_to_density, pearson_matrix, Binarization, CorrelationMatrix};
use crate::graph::{metrics_with, GraphMetrics};
use crate::model::{
    asymptotic_covariance, build_coupling, cov_to_corr, default_burn_in, generate_er,
    generate_weighted_er, simulate_ar1, CouplingMatrix, StructuralGraph,
};
use crate::nullmodels::{average_null_measures, draw_null, NullDraw, SmallWorldIndices};
use crate::rng::{mix_seed, Stream};

/// Coordinates of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellParams {
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
    pub p_sc: f64,
    pub p_fc: f64,
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::invalid(format!("n = {} must be at least 3", self.n)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::invalid(format!("s = {} outside (0, 1)", self.s)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha = {} must be finite and >= 0",
                self.alpha
            )));
        }
        for (name, p) in [("p_sc", self.p_sc), ("p_fc", self.p_fc)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(format!("{name} = {p} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// The four per-realization streams.
///
/// Seeds are keyed by parameter values (their bit patterns), not grid
/// positions, so a cell's records do not depend on which other values are
/// in the grid. The structure stream depends only on `(n, p_sc, r)`: the
/// same SC realization is reused across `s` and `alpha`. The noise stream
/// ignores `p_fc`, so one correlation matrix serves a whole `p_fc` row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellSeeds {
    pub structure: u64,
    pub noise: u64,
    pub tie: u64,
    pub null: u64,
}

fn bits(x: f64) -> u64 {
    // folds -0.0 into 0.0
    (x + 0.0).to_bits()
}

impl CellSeeds {
    pub fn derive(master_seed: u64, p: &CellParams, realization: usize) -> Self {
        let r = realization as u64;
        let n = p.n as u64;
        let (s, a, psc, pfc) = (bits(p.s), bits(p.alpha), bits(p.p_sc), bits(p.p_fc));
        Self {
            structure: mix_seed(master_seed, &[Stream::Structure as u64, n, psc, r]),
            noise: mix_seed(master_seed, &[Stream::Noise as u64, n, s, a, psc, r]),
            tie: mix_seed(
                master_seed,
                &[Stream::TieBreak as u64, n, s, a, psc, pfc, r],
            ),
            null: mix_seed(master_seed, &[Stream::Null as u64, n, s, a, psc, pfc, r]),
        }
    }

    /// Seed of the `k`-th null draw; the first draw uses `null` itself.
    pub fn null_draw(&self, k: usize) -> u64 {
        if k == 0 {
            self.null
        } else {
            mix_seed(self.null, &[k as u64])
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    DegenerateNormalization,
    NumericFailure,
    DegenerateSeries,
    NullFailure,
    Failed,
}

impl RecordStatus {
    fn of_error(e: &Error) -> Self {
        match e {
            Error::DegenerateNormalization => Self::DegenerateNormalization,
            Error::Numeric { .. } => Self::NumericFailure,
            Error::DegenerateSeries { .. } => Self::DegenerateSeries,
            _ => Self::Failed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ok => "ok",
            Self::DegenerateNormalization => "degenerate_normalization",
            Self::NumericFailure => "numeric_failure",
            Self::DegenerateSeries => "degenerate_series",
            Self::NullFailure => "null_failure",
            Self::Failed => "failed",
        }
    }
}

impl fmt::Display for RecordStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Self::Ok,
            Self::DegenerateNormalization,
            Self::NumericFailure,
            Self::DegenerateSeries,
            Self::NullFailure,
            Self::Failed,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
        .ok_or_else(|| Error::invalid(format!("unknown record status `{s}`")))
    }
}

/// One realization of one cell. Everything is `None` past the stage that failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationRecord {
    pub params: CellParams,
    pub realization: usize,
    pub status: RecordStatus,
    pub seeds: CellSeeds,
    pub sc_edges: Option<usize>,
    pub fc_edges: Option<usize>,
    pub n_components: Option<usize>,
    pub connected: Option<bool>,
    pub clustering: Option<f64>,
    pub path_length: Option<f64>,
    pub null_clustering: Option<f64>,
    pub null_path_length: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    /// Whether the record enters the cell aggregates.
    pub included: bool,
}

impl RealizationRecord {
    fn failed(
        params: CellParams,
        realization: usize,
        seeds: CellSeeds,
        status: RecordStatus,
    ) -> Self {
        Self {
            params,
            realization,
            status,
            seeds,
            sc_edges: None,
            fc_edges: None,
            n_components: None,
            connected: None,
            clustering: None,
            path_length: None,
            null_clustering: None,
            null_path_length: None,
            gamma: None,
            lambda: None,
            sigma: None,
            included: false,
        }
    }
}

/// Every intermediate object of one realization.
#[derive(Debug, Clone)]
pub struct RealizationArtifacts {
    pub params: CellParams,
    pub realization: usize,
    pub seeds: CellSeeds,
    pub sc: StructuralGraph,
    pub coupling: CouplingMatrix,
    pub correlation: CorrelationMatrix,
    pub fc: Binarization,
    pub fc_metrics: GraphMetrics,
    pub nulls: Vec<NullDraw>,
    pub null_metrics: Vec<GraphMetrics>,
    pub indices: SmallWorldIndices,
}

impl RealizationArtifacts {
    pub fn record(&self) -> RealizationRecord {
        let (null_c, null_l) = average_null_measures(&self.null_metrics);
        RealizationRecord {
            params: self.params,
            realization: self.realization,
            status: RecordStatus::Ok,
            seeds: self.seeds,
            sc_edges: Some(self.sc.topology().edge_count()),
            fc_edges: Some(self.fc_metrics.edge_count),
            n_components: Some(self.fc_metrics.n_components),
            connected: Some(self.fc_metrics.n_components == 1),
            clustering: Some(self.fc_metrics.clustering),
            path_length: self.fc_metrics.avg_path_length,
            null_clustering: Some(null_c),
            null_path_length: null_l,
            gamma: self.indices.gamma,
            lambda: self.indices.lambda,
            sigma: self.indices.sigma,
            included: true,
        }
    }
}

fn generate_sc(
    p: &CellParams,
    seeds: &CellSeeds,
    options: &PipelineOptions,
) -> Result<StructuralGraph> {
    match options.sc_weights.distribution() {
        None => generate_er(p.n, p.p_sc, seeds.structure),
        Some(dist) => generate_weighted_er(p.n, p.p_sc, dist, seeds.structure),
    }
}

/// Correlation matrix of the process driven by `a`: exact stationary
/// correlation, or Pearson correlation of a simulated sample.
pub fn correlation_for(
    a: &CouplingMatrix,
    mode: SimulationMode,
    noise_seed: u64,
) -> Result<CorrelationMatrix> {
    match mode {
        SimulationMode::Asymptotic => cov_to_corr(&asymptotic_covariance(a)?),
        SimulationMode::Finite { t_len, burn_in } => {
            let burn_in = burn_in.unwrap_or_else(|| default_burn_in(a.s()));
            pearson_matrix(&simulate_ar1(a, t_len, burn_in, noise_seed)?)
        }
    }
}

struct Upstream {
    sc: StructuralGraph,
    coupling: CouplingMatrix,
    correlation: CorrelationMatrix,
}

struct Downstream {
    fc: Binarization,
    fc_metrics: GraphMetrics,
    nulls: Vec<NullDraw>,
    null_metrics: Vec<GraphMetrics>,
    indices: SmallWorldIndices,
}

fn upstream(
    sc: StructuralGraph,
    p: &CellParams,
    seeds: &CellSeeds,
    options: &PipelineOptions,
) -> Result<Upstream> {
    let coupling = build_coupling(&sc, p.s, p.alpha)?;
    let correlation = correlation_for(&coupling, options.mode, seeds.noise)?;
    Ok(Upstream {
        sc,
        coupling,
        correlation,
    })
}

fn downstream(
    correlation: &CorrelationMatrix,
    p: &CellParams,
    seeds: &CellSeeds,
    options: &PipelineOptions,
) -> std::result::Result<Downstream, (RecordStatus, Error)> {
    let fc = binarize_to_density(correlation, p.p_fc, seeds.tie, options.threshold)
        .map_err(|e| (RecordStatus::of_error(&e), e))?;
    let fc_metrics = metrics_with(&fc.graph, options.path_convention);
    let nulls = (0..options.null_realizations)
        .map(|k| {
            draw_null(
                &fc.graph,
                options.null_model,
                options.swap_factor,
                seeds.null_draw(k),
            )
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| (RecordStatus::NullFailure, e))?;
    let null_metrics: Vec<GraphMetrics> = nulls
        .iter()
        .map(|d| metrics_with(&d.graph, options.path_convention))
        .collect();
    let (null_c, null_l) = average_null_measures(&null_metrics);
    let indices = SmallWorldIndices::from_measures(
        fc_metrics.clustering,
        fc_metrics.avg_path_length,
        null_c,
        null_l,
        options.null_model,
        seeds.null,
    );
    Ok(Downstream {
        fc,
        fc_metrics,
        nulls,
        null_metrics,
        indices,
    })
}

/// Run the whole pipeline for one realization and keep every artifact.
pub fn run_realization(
    params: &CellParams,
    realization: usize,
    master_seed: u64,
    options: &PipelineOptions,
) -> Result<RealizationArtifacts> {
    params.validate()?;
    let seeds = CellSeeds::derive(master_seed, params, realization);
    let sc = generate_sc(params, &seeds, options)?;
    let up = upstream(sc, params, &seeds, options)?;
    let down = downstream(&up.correlation, params, &seeds, options).map_err(|(_, e)| e)?;
    Ok(RealizationArtifacts {
        params: *params,
        realization,
        seeds,
        sc: up.sc,
        coupling: up.coupling,
        correlation: up.correlation,
        fc: down.fc,
        fc_metrics: down.fc_metrics,
        nulls: down.nulls,
        null_metrics: down.null_metrics,
        indices: down.indices,
    })
}

/// Record for one realization. Pipeline failures become a record with a
/// non-ok status rather than an error.
pub fn run_cell(
    params: &CellParams,
    realization: usize,
    master_seed: u64,
    options: &PipelineOptions,
) -> Result<RealizationRecord> {
    params.validate()?;
    Ok(
        records_for_row(params, &[params.p_fc], realization, master_seed, options)
            .pop()
            .expect("one density gives one record"),
    )
}

/// Records for one `(n, s, alpha, p_sc, r)` and every `p_fc` in `p_fc_values`,
/// sharing a single correlation matrix.
fn records_for_row(
    base: &CellParams,
    p_fc_values: &[f64],
    realization: usize,
    master_seed: u64,
    options: &PipelineOptions,
) -> Vec<RealizationRecord> {
    let cell = |p_fc| CellParams { p_fc, ..*base };
    let seeds_for = |p: &CellParams| CellSeeds::derive(master_seed, p, realization);
    let all_failed = |status, sc_edges| {
        p_fc_values
            .iter()
            .map(|&p_fc| {
                let p = cell(p_fc);
                let mut r = RealizationRecord::failed(p, realization, seeds_for(&p), status);
                r.sc_edges = sc_edges;
                r
            })
            .collect()
    };

    let row_seeds = seeds_for(base);
    let sc = match generate_sc(base, &row_seeds, options) {
        Ok(sc) => sc,
        Err(e) => return all_failed(RecordStatus::of_error(&e), None),
    };
    let sc_edges = Some(sc.topology().edge_count());
    let up = match upstream(sc, base, &row_seeds, options) {
        Ok(up) => up,
        Err(e) => return all_failed(RecordStatus::of_error(&e), sc_edges),
    };

    p_fc_values
        .iter()
        .map(|&p_fc| {
            let p = cell(p_fc);
            let seeds = seeds_for(&p);
            match downstream(&up.correlation, &p, &seeds, options) {
                Ok(down) => RealizationArtifacts {
                    params: p,
                    realization,
                    seeds,
                    sc: up.sc.clone(),
                    coupling: up.coupling.clone(),
                    correlation: up.correlation.clone(),
                    fc: down.fc,
                    fc_metrics: down.fc_metrics,
                    nulls: down.nulls,
                    null_metrics: down.null_metrics,
                    indices: down.indices,
                }
                .record(),
                Err((status, _)) => {
                    let mut r = RealizationRecord::failed(p, realization, seeds, status);
                    r.sc_edges = sc_edges;
                    r
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellAggregates {
    /// Records that entered aggregation.
    pub included: usize,
    pub gamma: IndexSummary,
    pub lambda: IndexSummary,
    pub sigma: IndexSummary,
    /// Included records with a defined sigma.
    pub count_defined: usize,
    pub count_sigma_gt_1: usize,
    /// Exact two-sided sign test of median sigma = 1.
    pub sign_test_p: Option<f64>,
    pub sign_test_above: Option<usize>,
    /// Two-sided one-sample t-test of mean sigma = 1.
    pub t_test_p: Option<f64>,
}

/// Aggregate the included records, in the given order, over defined values only.
pub fn aggregate_records(records: &[RealizationRecord]) -> CellAggregates {
    let included: Vec<&RealizationRecord> = records.iter().filter(|r| r.included).collect();
    let defined = |f: fn(&RealizationRecord) -> Option<f64>| -> Vec<f64> {
        included.iter().filter_map(|r| f(r)).collect()
    };
    let sigmas = defined(|r| r.sigma);
    let sign = sign_test(&sigmas, 1.0);
    CellAggregates {
        included: included.len(),
        gamma: summarize(&defined(|r| r.gamma)),
        lambda: summarize(&defined(|r| r.lambda)),
        sigma: summarize(&sigmas),
        count_defined: sigmas.len(),
        count_sigma_gt_1: sigmas.iter().filter(|&&s| s > 1.0).count(),
        sign_test_p: sign.map(|t| t.p_value),
        sign_test_above: sign.map(|t| t.above),
        t_test_p: t_test_one_sample(&sigmas, 1.0).map(|t| t.p_value),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub params: CellParams,
    /// Ordered by realization index.
    pub records: Vec<RealizationRecord>,
    pub aggregates: CellAggregates,
}

impl CellResult {
    pub fn from_records(params: CellParams, records: Vec<RealizationRecord>) -> Self {
        let aggregates = aggregate_records(&records);
        Self {
            params,
            records,
            aggregates,
        }
    }

    /// Defined sigma values of the included records.
    pub fn sigmas(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.included)
            .filter_map(|r| r.sigma)
            .collect()
    }
}

/// Evaluate every cell of the grid. Work is spread over `jobs` threads
/// (all cores when `None`); the output does not depend on the thread count.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<Vec<CellResult>> {
    let reps = config.realizations;
    let mut rows = Vec::new();
    for &n in &config.n_values {
        for &s in &config.s_values {
            for &alpha in &config.alpha_values {
                for &p_sc in &config.p_sc_values {
                    let base = CellParams {
                        n,
                        s,
                        alpha,
                        p_sc,
                        p_fc: config.p_fc_values[0],
                    };
                    base.validate()?;
                    rows.extend((0..reps).map(|r| (base, r)));
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let computed: Vec<Vec<RealizationRecord>> = pool.install(|| {
        rows.par_iter()
            .map(|(base, r)| {
                let mut records = records_for_row(
                    base,
                    &config.p_fc_values,
                    *r,
                    config.master_seed,
                    &config.options,
                );
                if config.connected_only {
                    for rec in &mut records {
                        rec.included &= rec.connected == Some(true);
                    }
                }
                records
            })
            .collect()
    });

    let n_fc = config.p_fc_values.len();
    let mut cells = Vec::with_capacity(computed.len() / reps.max(1) * n_fc);
    for row_group in computed.chunks(reps) {
        for f in 0..n_fc {
            let records: Vec<RealizationRecord> =
                row_group.iter().map(|row| row[f].clone()).collect();
            cells.push(CellResult::from_records(records[0].params, records));
        }
    }
    Ok(cells)
}
