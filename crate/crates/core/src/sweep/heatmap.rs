//! Heatmap grids: one aggregate per (p_sc, p_fc) cell at fixed (n, s, alpha).
//!
//! The grid file holds one line per `p_sc` value and one whitespace-separated
//! column per `p_fc` value, both in the order they first appear in the
//! results, with `NA` for undefined cells. The axis sidecar has two lines,
//! `p_sc ...` and `p_fc ...`, listing the densities.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::run::CellResult;
use super::stats::IndexSummary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Sigma,
    Gamma,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Mean,
    Median,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Self::Sigma),
            "gamma" => Ok(Self::Gamma),
            "lambda" => Ok(Self::Lambda),
            other => Err(Error::Usage(format!(
                "unknown metric `{other}`; valid metrics: sigma, gamma, lambda"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sigma => "sigma",
            Self::Gamma => "gamma",
            Self::Lambda => "lambda",
        })
    }
}

impl FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            other => Err(Error::Usage(format!(
                "unknown aggregate `{other}`; valid aggregates: mean, median"
            ))),
        }
    }
}

impl fmt::Display for Aggregate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mean => "mean",
            Self::Median => "median",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapGrid {
    pub metric: Metric,
    pub aggregate: Aggregate,
    pub n: usize,
    pub s: f64,
    pub alpha: f64,
    pub p_sc: Vec<f64>,
    pub p_fc: Vec<f64>,
    /// `values[row][col]` for `p_sc[row]`, `p_fc[col]`.
    pub values: Vec<Vec<Option<f64>>>,
}

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if !v.contains(&x) {
        v.push(x);
    }
}

/// Collect the grid for `(n, s, alpha)`. Errors with the list of absent
/// `(p_sc, p_fc)` pairs when the grid is not rectangular.
pub fn emit_heatmap(
    results: &[CellResult],
    metric: Metric,
    aggregate: Aggregate,
    n: usize,
    s: f64,
    alpha: f64,
) -> Result<HeatmapGrid> {
    let cells: Vec<&CellResult> = results
        .iter()
        .filter(|c| c.params.n == n && c.params.s == s && c.params.alpha == alpha)
        .collect();
    if cells.is_empty() {
        return Err(Error::MissingCells(vec![format!(
            "n={n} s={s} alpha={alpha} (no cells)"
        )]));
    }
    let (mut p_sc, mut p_fc) = (Vec::new(), Vec::new());
    for c in &cells {
        push_unique(&mut p_sc, c.params.p_sc);
        push_unique(&mut p_fc, c.params.p_fc);
    }

    let mut missing = Vec::new();
    let values = p_sc
        .iter()
        .map(|&row| {
            p_fc.iter()
                .map(|&col| {
                    match cells
                        .iter()
                        .find(|c| c.params.p_sc == row && c.params.p_fc == col)
                    {
                        Some(c) => {
                            let summary: &IndexSummary = match metric {
                                Metric::Sigma => &c.aggregates.sigma,
                                Metric::Gamma => &c.aggregates.gamma,
                                Metric::Lambda => &c.aggregates.lambda,
                            };
                            match aggregate {
                                Aggregate::Mean => summary.mean,
                                Aggregate::Median => summary.median,
                            }
                        }
                        None => {
                            missing.push(format!("p_sc={row} p_fc={col}"));
                            None
                        }
                    }
                })
                .collect()
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }
    Ok(HeatmapGrid {
        metric,
        aggregate,
        n,
        s,
        alpha,
        p_sc,
        p_fc,
        values,
    })
}

impl HeatmapGrid {
    pub fn format_grid(&self, header_lines: &[String]) -> String {
        let mut out = String::new();
        for line in header_lines {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(
            out,
            "# {} {} at n={} s={} alpha={}; rows p_sc, columns p_fc",
            self.aggregate, self.metric, self.n, self.s, self.alpha
        );
        for row in &self.values {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map_or_else(|| "NA".to_string(), |x| x.to_string()))
                .collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }

    pub fn format_axes(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        format!("p_sc {}\np_fc {}\n", join(&self.p_sc), join(&self.p_fc))
    }

    /// Path of the axis sidecar for a grid written to `output`.
    pub fn axes_path(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".axes");
        PathBuf::from(name)
    }

    /// Write grid and sidecar; returns both paths.
    pub fn write(&self, output: &Path, header_lines: &[String]) -> Result<Vec<PathBuf>> {
        let axes = Self::axes_path(output);
        std::fs::write(output, self.format_grid(header_lines)).map_err(|e| Error::io(output, e))?;
        std::fs::write(&axes, self.format_axes()).map_err(|e| Error::io(&axes, e))?;
        Ok(vec![output.to_path_buf(), axes])
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run_sweep, PipelineOptions, SweepConfig};
    use super::*;

    fn sweep(p_sc: Vec<f64>, p_fc: Vec<f64>) -> Vec<CellResult> {
        let cfg = SweepConfig {
            n_values: vec![20],
            s_values: vec![0.5],
            alpha_values: vec![1.0],
            p_sc_values: p_sc,
            p_fc_values: p_fc,
            realizations: 2,
            options: PipelineOptions::default(),
            connected_only: false,
            master_seed: 1,
        };
        run_sweep(&cfg, Some(1)).unwrap()
    }

    #[test]
    fn two_by_two() {
        let cells = sweep(vec![0.3, 0.2], vec![0.4, 0.25]);
        let grid = emit_heatmap(&cells, Metric::Sigma, Aggregate::Median, 20, 0.5, 1.0).unwrap();
        assert_eq!(grid.p_sc, vec![0.3, 0.2]);
        assert_eq!(grid.p_fc, vec![0.4, 0.25]);
        assert_eq!(grid.values[1][0], cells[2].aggregates.sigma.median);
        let text = grid.format_grid(&[]);
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.split(' ').count() == 2));
        assert_eq!(grid.format_axes(), "p_sc 0.3 0.2\np_fc 0.4 0.25\n");
    }

    #[test]
    fn undefined_cell_is_na() {
        let mut cells = sweep(vec![0.3], vec![0.4]);
        cells[0].aggregates.sigma = IndexSummary::default();
        let grid = emit_heatmap(&cells, Metric::Sigma, Aggregate::Mean, 20, 0.5, 1.0).unwrap();
        assert_eq!(grid.values, vec![vec![None]]);
        assert!(grid.format_grid(&[]).ends_with("\nNA\n"));
    }

    #[test]
    fn missing_cells_listed() {
        let mut cells = sweep(vec![0.3, 0.2], vec![0.4, 0.25]);
        cells.remove(1);
        match emit_heatmap(&cells, Metric::Gamma, Aggregate::Mean, 20, 0.5, 1.0).unwrap_err() {
            Error::MissingCells(list) => assert_eq!(list, vec!["p_sc=0.3 p_fc=0.25".to_string()]),
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            emit_heatmap(&cells, Metric::Gamma, Aggregate::Mean, 21, 0.5, 1.0),
            Err(Error::MissingCells(_))
        ));
    }

    #[test]
    fn metric_typo_lists_valid_names() {
        let err = "sigmaa".parse::<Metric>().unwrap_err();
        assert!(matches!(&err, Error::Usage(m) if m.contains("sigma, gamma, lambda")));
    }
}
