//! The `fcsw` command line.
//!
//! Sweep parameters come from a TOML file (`--config`) and/or flags named
//! after the config keys (`--p-fc-values 0.1,0.05`). A flag always wins
//! over the file. Failures print one line `error[<category>]: <message>`
//! to stderr; the exit status is 2 for usage errors and 1 otherwise.

mod commands;
mod manifest;

use std::ffi::OsString;
use std::fmt;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_analyze, cmd_demo, cmd_heatmap, cmd_sweep, demo_setup, format_metrics,
    resolve_sweep_config, AnalyzeReport, DemoReport, SweepReport,
};
pub use manifest::RunManifest;

use crate::error::{Error, Result};
use crate::fc::ThresholdMode;
use crate::graph::PathConvention;
use crate::nullmodels::NullModel;
use crate::sweep::{Aggregate, Metric, ScWeights};
use crate::textio::InputFormat;

#[derive(Debug, Parser)]
#[command(
    name = "fcsw",
    version,
    about = "Small-world bias of correlation-based functional connectivity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single finite-sample realization (n=100, p_sc=p_fc=0.1, s=0.1, alpha=2, T=300)
    Demo(DemoArgs),
    /// Metrics and small-world indices of a graph or correlation matrix
    Analyze(AnalyzeArgs),
    /// Parameter sweep written as a results table
    Sweep(SweepArgs),
    /// Heatmap grid of one aggregate from a results table
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "demo_out")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Auto,
    EdgeList,
    GraphMatrix,
    Correlation,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => InputFormat::Auto,
            FormatArg::EdgeList => InputFormat::EdgeList,
            FormatArg::GraphMatrix => InputFormat::GraphMatrix,
            FormatArg::Correlation => InputFormat::Correlation,
        }
    }
}

impl fmt::Display for FormatArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Edge list (`n m` header), 0/1 adjacency matrix or correlation matrix
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    /// Target density; required for correlation-matrix input
    #[arg(long)]
    pub p_fc: Option<f64>,
    #[arg(long, default_value = "er")]
    pub null_model: NullModel,
    #[arg(long)]
    pub swap_factor: Option<f64>,
    #[arg(long, default_value = "signed")]
    pub threshold: ThresholdMode,
    #[arg(long, default_value = "finite_pairs")]
    pub path_convention: PathConvention,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write graph, null graph, metrics and a manifest here
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// TOML file with sweep keys; flags below override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "sweep_out")]
    pub output_dir: PathBuf,
    /// Master seed (overrides `master_seed`)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores. Output does not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub s_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_values: Option<Vec<f64>>,
    /// Comma-separated densities, or `grid24`
    #[arg(long, value_delimiter = ',')]
    pub p_sc_values: Option<Vec<String>>,
    /// Comma-separated densities, or `grid24`
    #[arg(long, value_delimiter = ',')]
    pub p_fc_values: Option<Vec<String>>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// `asymptotic` or `finite`
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub t_len: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub null_model: Option<NullModel>,
    #[arg(long)]
    pub swap_factor: Option<f64>,
    #[arg(long)]
    pub null_realizations: Option<usize>,
    #[arg(long)]
    pub sc_weights: Option<ScWeights>,
    #[arg(long)]
    pub threshold: Option<ThresholdMode>,
    #[arg(long)]
    pub path_convention: Option<PathConvention>,
    #[arg(long)]
    pub connected_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct HeatmapArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// sigma, gamma or lambda
    #[arg(long)]
    pub metric: Metric,
    /// mean or median
    #[arg(long, default_value = "median")]
    pub aggregate: Aggregate,
    /// Needed only when the table holds several values
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Grid file; the axes go to `<output>.axes`
    #[arg(long)]
    pub output: PathBuf,
}

/// Run a parsed command, printing its summary to stdout.
pub fn run(cli: Cli) -> Result<()> {
    let mut out = std::io::stdout().lock();
    // a closed stdout (e.g. piped into `head`) is not an error
    match cli.command {
        Command::Demo(args) => {
            let seed = args.seed.ok_or_else(|| {
                Error::Usage("demo needs --seed (runs are never seeded from the clock)".into())
            })?;
            let report = cmd_demo(seed, &args.output_dir)?;
            let idx = &report.artifacts.indices;
            let _ = writeln!(out, "{}", idx.to_record());
            let _ = writeln!(
                out,
                "sc_referenced gamma={} lambda={} sigma={}",
                opt(report.sc_referenced.gamma),
                opt(report.sc_referenced.lambda),
                opt(report.sc_referenced.sigma)
            );
            let _ = writeln!(
                out,
                "wrote {} files to {}",
                report.manifest.outputs.len(),
                args.output_dir.display()
            );
        }
        Command::Analyze(args) => {
            let _ = write!(out, "{}", cmd_analyze(&args)?.render());
        }
        Command::Sweep(args) => {
            let report = cmd_sweep(&args)?;
            let _ = writeln!(
                out,
                "{} cells written to {}",
                report.cells.len(),
                report.results_path.display()
            );
        }
        Command::Heatmap(args) => {
            let (manifest, grid) = cmd_heatmap(&args)?;
            let _ = writeln!(
                out,
                "{}x{} grid written to {}",
                grid.p_sc.len(),
                grid.p_fc.len(),
                manifest.outputs[0].display()
            );
        }
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| x.to_string())
}

/// Parse `args`, run, report errors; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!(
                "error[{}]: {}",
                e.category(),
                e.to_string().replace('\n', " ")
            );
            if matches!(e, Error::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
