use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::manifest::{ensure_dir, ManifestBuilder, RunManifest};
use super::{AnalyzeArgs, HeatmapArgs, SweepArgs};
use crate::error::{Error, Result};
use crate::fc::binarize_to_density;
use crate::graph::{metrics_with, GraphMetrics};
use crate::nullmodels::{draw_null, SmallWorldIndices, DEFAULT_SWAP_FACTOR};
use crate::rng::{mix_seed, Stream};
use crate::sweep::{
    emit_heatmap, format_results, parse_results, run_realization, run_sweep, CellParams,
    CellResult, DensityList, HeatmapGrid, PipelineOptions, RealizationArtifacts, SimulationMode,
    SweepConfigFile, LARGE_SWEEP_UNITS,
};
use crate::textio::{
    format_edge_list, format_graph_matrix, format_matrix, parse_analysis_input, AnalysisInput,
};

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".into(), |x| x.to_string())
}

fn comment(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

/// `key=value` lines for a graph's metrics, keys prefixed with `prefix`.
pub fn format_metrics(prefix: &str, m: &GraphMetrics) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{prefix}edges={}", m.edge_count);
    let _ = writeln!(out, "{prefix}density={}", m.density);
    let _ = writeln!(out, "{prefix}clustering={}", m.clustering);
    let _ = writeln!(
        out,
        "{prefix}avg_path_length={}",
        fmt_opt(m.avg_path_length)
    );
    let _ = writeln!(out, "{prefix}components={}", m.n_components);
    let _ = writeln!(
        out,
        "{prefix}finite_pair_fraction={}",
        m.finite_pair_fraction
    );
    out
}

/// Parameters of the single-realization demonstration run.
pub fn demo_setup() -> (CellParams, PipelineOptions) {
    let params = CellParams {
        n: 100,
        s: 0.1,
        alpha: 2.0,
        p_sc: 0.1,
        p_fc: 0.1,
    };
    let options = PipelineOptions {
        mode: SimulationMode::Finite {
            t_len: 300,
            burn_in: None,
        },
        ..PipelineOptions::default()
    };
    (params, options)
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub manifest: RunManifest,
    pub artifacts: RealizationArtifacts,
    pub sc_metrics: GraphMetrics,
    /// FC measures relative to the structural graph instead of a null graph.
    pub sc_referenced: SmallWorldIndices,
}

pub fn cmd_demo(seed: u64, output_dir: &Path) -> Result<DemoReport> {
    let (params, options) = demo_setup();
    let mut mb = ManifestBuilder::new(
        "demo",
        Some(seed),
        json!({ "cell": params, "options": options, "realization": 0 }),
    );
    ensure_dir(output_dir)?;
    let art = run_realization(&params, 0, seed, &options)?;
    let sc_metrics = metrics_with(art.sc.topology(), options.path_convention);
    let sc_referenced = SmallWorldIndices::from_metrics(
        &art.fc_metrics,
        &sc_metrics,
        options.null_model,
        art.seeds.structure,
    );

    let header = mb.header_lines();
    let with = |extra: String| -> String {
        let mut lines = header.clone();
        lines.push(extra);
        lines.join("\n")
    };
    mb.write(
        output_dir.join("sc.txt"),
        &format_graph_matrix(
            art.sc.topology(),
            Some(&with(format!(
                "structural adjacency, seed {}",
                art.seeds.structure
            ))),
        ),
    )?;
    mb.write(
        output_dir.join("correlation.txt"),
        &format_matrix(
            art.correlation.entries(),
            Some(&with(format!(
                "pearson correlation, noise seed {}",
                art.seeds.noise
            ))),
        ),
    )?;
    mb.write(
        output_dir.join("fc_graph.txt"),
        &format_edge_list(
            &art.fc.graph,
            Some(&with(format!("binarized at density {}", params.p_fc))),
        ),
    )?;

    let null_metrics = &art.null_metrics[0];
    let mut metrics_text = comment(&header);
    metrics_text += &format_metrics("fc_", &art.fc_metrics);
    metrics_text += &format_metrics("null_", null_metrics);
    metrics_text += &format_metrics("sc_", &sc_metrics);
    let _ = writeln!(metrics_text, "gamma_sc={}", fmt_opt(sc_referenced.gamma));
    let _ = writeln!(metrics_text, "lambda_sc={}", fmt_opt(sc_referenced.lambda));
    let _ = writeln!(metrics_text, "sigma_sc={}", fmt_opt(sc_referenced.sigma));
    mb.write(output_dir.join("metrics.txt"), &metrics_text)?;
    mb.write(
        output_dir.join("indices.txt"),
        &format!("{}{}\n", comment(&header), art.indices.to_record()),
    )?;

    let manifest = mb.finish(Some(output_dir.join("manifest.json")))?;
    Ok(DemoReport {
        manifest,
        artifacts: art,
        sc_metrics,
        sc_referenced,
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub manifest: RunManifest,
    pub metrics: GraphMetrics,
    pub null_metrics: GraphMetrics,
    pub indices: SmallWorldIndices,
}

impl AnalyzeReport {
    pub fn render(&self) -> String {
        let mut out = format_metrics("", &self.metrics);
        out += &format_metrics("null_", &self.null_metrics);
        out += &self.indices.to_record();
        out.push('\n');
        out
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let path = args.input.as_path();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tie_seed = mix_seed(args.seed, &[Stream::TieBreak as u64]);
    let null_seed = mix_seed(args.seed, &[Stream::Null as u64]);
    let swap_factor = args.swap_factor.unwrap_or(DEFAULT_SWAP_FACTOR);
    let mut mb = ManifestBuilder::new(
        "analyze",
        Some(args.seed),
        json!({
            "input": path,
            "format": args.format.to_string(),
            "p_fc": args.p_fc,
            "null_model": args.null_model,
            "swap_factor": swap_factor,
            "threshold": args.threshold,
            "path_convention": args.path_convention,
            "tie_seed": tie_seed,
            "null_seed": null_seed,
        }),
    );

    let graph = match parse_analysis_input(&text, Some(path), args.format.into())? {
        AnalysisInput::Graph(g) => g,
        AnalysisInput::Correlation(c) => {
            let p_fc = args
                .p_fc
                .ok_or_else(|| Error::Usage("correlation-matrix input needs --p-fc".into()))?;
            binarize_to_density(&c, p_fc, tie_seed, args.threshold)?.graph
        }
    };
    let null = draw_null(&graph, args.null_model, swap_factor, null_seed)?;
    let metrics = metrics_with(&graph, args.path_convention);
    let null_metrics = metrics_with(&null.graph, args.path_convention);
    let indices =
        SmallWorldIndices::from_metrics(&metrics, &null_metrics, args.null_model, null_seed);

    let manifest_path = match &args.output_dir {
        Some(dir) => {
            ensure_dir(dir)?;
            let lines = mb.header_lines();
            let header = lines.join("\n");
            mb.write(
                dir.join("graph.txt"),
                &format_edge_list(&graph, Some(&header)),
            )?;
            mb.write(
                dir.join("null_graph.txt"),
                &format_edge_list(
                    &null.graph,
                    Some(&format!(
                        "{header}\n{} null, seed {null_seed}",
                        args.null_model
                    )),
                ),
            )?;
            let mut text = comment(&lines);
            text += &format_metrics("", &metrics);
            text += &format_metrics("null_", &null_metrics);
            mb.write(dir.join("metrics.txt"), &text)?;
            mb.write(
                dir.join("indices.txt"),
                &format!("{}{}\n", comment(&lines), indices.to_record()),
            )?;
            Some(dir.join("manifest.json"))
        }
        None => None,
    };
    Ok(AnalyzeReport {
        manifest: mb.finish(manifest_path)?,
        metrics,
        null_metrics,
        indices,
    })
}

fn density_override(values: &Option<Vec<String>>, key: &str) -> Result<Option<DensityList>> {
    let Some(values) = values else {
        return Ok(None);
    };
    if let [single] = values.as_slice() {
        if single.parse::<f64>().is_err() {
            return Ok(Some(DensityList::Named(single.clone())));
        }
    }
    values
        .iter()
        .map(|v| {
            v.parse::<f64>().map_err(|_| Error::Config {
                key: key.into(),
                message: format!("`{v}` is not a number"),
            })
        })
        .collect::<Result<Vec<f64>>>()
        .map(|v| Some(DensityList::Values(v)))
}

/// Config file contents with command-line overrides applied. Flags win over file values.
pub fn resolve_sweep_config(args: &SweepArgs) -> Result<SweepConfigFile> {
    let mut file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            SweepConfigFile::from_toml(&text)?
        }
        None => SweepConfigFile::default(),
    };
    macro_rules! set {
        ($field:ident) => {
            if args.$field.is_some() {
                file.$field = args.$field.clone();
            }
        };
    }
    set!(n_values);
    set!(s_values);
    set!(alpha_values);
    set!(realizations);
    set!(mode);
    set!(t_len);
    set!(burn_in);
    set!(null_model);
    set!(swap_factor);
    set!(null_realizations);
    set!(sc_weights);
    set!(threshold);
    set!(path_convention);
    if let Some(v) = density_override(&args.p_sc_values, "p_sc_values")? {
        file.p_sc_values = Some(v);
    }
    if let Some(v) = density_override(&args.p_fc_values, "p_fc_values")? {
        file.p_fc_values = Some(v);
    }
    if args.connected_only {
        file.connected_only = Some(true);
    }
    if args.seed.is_some() {
        file.master_seed = args.seed;
    }
    Ok(file)
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub manifest: RunManifest,
    pub results_path: PathBuf,
    pub cells: Vec<CellResult>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<SweepReport> {
    let config = resolve_sweep_config(args)?.validate()?;
    if config.work_units() > LARGE_SWEEP_UNITS {
        eprintln!(
            "warning: {} cells x {} realizations; this sweep may take hours",
            config.cell_count(),
            config.realizations
        );
    }
    let mut mb = ManifestBuilder::new(
        "sweep",
        Some(config.master_seed),
        json!({ "config": config, "jobs": args.jobs }),
    );
    ensure_dir(&args.output_dir)?;
    let cells = run_sweep(&config, args.jobs)?;
    // the table header carries the config only, so it does not depend on --jobs
    let header = vec![
        format!("fcsw {} sweep results", crate::VERSION),
        format!(
            "config {}",
            serde_json::to_string(&config).expect("config serializes")
        ),
    ];
    let results_path = args.output_dir.join("results.tsv");
    mb.write(results_path.clone(), &format_results(&cells, &header))?;
    let manifest = mb.finish(Some(args.output_dir.join("manifest.json")))?;
    Ok(SweepReport {
        manifest,
        results_path,
        cells,
    })
}

fn pick_unique<T: PartialEq + Copy + std::fmt::Display>(
    given: Option<T>,
    cells: &[CellResult],
    get: impl Fn(&CellParams) -> T,
    flag: &str,
) -> Result<T> {
    if let Some(v) = given {
        return Ok(v);
    }
    let mut seen: Vec<T> = Vec::new();
    for c in cells {
        let v = get(&c.params);
        if !seen.contains(&v) {
            seen.push(v);
        }
    }
    match seen.as_slice() {
        [only] => Ok(*only),
        [] => Err(Error::Usage("results table has no cells".into())),
        many => Err(Error::Usage(format!(
            "results contain several values for {flag} ({}); pick one with {flag}",
            many.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub fn cmd_heatmap(args: &HeatmapArgs) -> Result<(RunManifest, HeatmapGrid)> {
    let path = args.results.as_path();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cells = parse_results(&text, Some(path))?;
    let n = pick_unique(args.n, &cells, |p| p.n, "--n")?;
    let s = pick_unique(args.s, &cells, |p| p.s, "--s")?;
    let alpha = pick_unique(args.alpha, &cells, |p| p.alpha, "--alpha")?;
    let mut mb = ManifestBuilder::new(
        "heatmap",
        None,
        json!({
            "results": path,
            "metric": args.metric.to_string(),
            "aggregate": args.aggregate.to_string(),
            "n": n,
            "s": s,
            "alpha": alpha,
        }),
    );
    let grid = emit_heatmap(&cells, args.metric, args.aggregate, n, s, alpha)?;
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let written = grid.write(&args.output, &mb.header_lines())?;
    mb.record(written);
    let mut manifest_path = args.output.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    let manifest = mb.finish(Some(PathBuf::from(manifest_path)))?;
    Ok((manifest, grid))
}
