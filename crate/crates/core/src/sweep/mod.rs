//! Parameter study over (n, s, alpha, p_sc, p_fc): per-realization records,
//! per-cell aggregates with location tests against sigma = 1, a results
//! table, and heatmap grids.

mod config;
mod heatmap;
mod run;
mod stats;
mod table;

pub use config::{
    DensityList, PipelineOptions, ScWeights, SimulationMode, SweepConfig, SweepConfigFile,
    DEFAULT_REALIZATIONS, LARGE_SWEEP_UNITS,
};
pub use heatmap::{emit_heatmap, Aggregate, HeatmapGrid, Metric};
pub use run::{
    aggregate_records, correlation_for, run_cell, run_realization, run_sweep, CellAggregates,
    CellParams, CellResult, CellSeeds, RealizationArtifacts, RealizationRecord, RecordStatus,
};
pub use stats::{sign_test, summarize, t_test_one_sample, IndexSummary, SignTest, TTest};
pub use table::{format_results, parse_results, RESULT_COLUMNS};

/// `2^0, 2^-0.3, ..., 2^-6.9`: 24 strictly decreasing densities.
pub fn default_density_grid() -> Vec<f64> {
    (0..24).map(|k| 2f64.powf(-0.3 * k as f64)).collect()
}
