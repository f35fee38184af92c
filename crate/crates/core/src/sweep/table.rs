//! Tab-separated results table.
//!
//! After `#` comment lines comes a header row with [`RESULT_COLUMNS`], then
//! for every cell (in grid order) one `realization` row per realization
//! followed by one `aggregate` row. Columns that do not apply to a row
//! type, and undefined values, hold `NA`. Reals are written in shortest
//! round-trip form, so parsing a table gives back the exact values.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::run::{
    CellAggregates, CellParams, CellResult, CellSeeds, RealizationRecord, RecordStatus,
};
use super::stats::IndexSummary;
use crate::error::{Error, Result};

pub const RESULT_COLUMNS: [&str; 41] = [
    "row",
    "n",
    "s",
    "alpha",
    "p_sc",
    "p_fc",
    "realization",
    "status",
    "included",
    "structure_seed",
    "noise_seed",
    "tie_seed",
    "null_seed",
    "sc_edges",
    "fc_edges",
    "n_components",
    "connected",
    "clustering",
    "path_length",
    "null_clustering",
    "null_path_length",
    "gamma",
    "lambda",
    "sigma",
    "count_included",
    "count_defined",
    "count_sigma_gt_1",
    "gamma_defined",
    "gamma_mean",
    "gamma_median",
    "gamma_std",
    "lambda_defined",
    "lambda_mean",
    "lambda_median",
    "lambda_std",
    "sigma_mean",
    "sigma_median",
    "sigma_std",
    "sign_test_p",
    "sign_test_above",
    "t_test_p",
];

const NA: &str = "NA";
const AGGREGATE_START: usize = 24;

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

fn params_fields(p: &CellParams) -> [String; 5] {
    [
        p.n.to_string(),
        p.s.to_string(),
        p.alpha.to_string(),
        p.p_sc.to_string(),
        p.p_fc.to_string(),
    ]
}

fn record_row(r: &RealizationRecord) -> Vec<String> {
    let mut row = vec!["realization".to_string()];
    row.extend(params_fields(&r.params));
    row.extend([
        r.realization.to_string(),
        r.status.to_string(),
        r.included.to_string(),
        r.seeds.structure.to_string(),
        r.seeds.noise.to_string(),
        r.seeds.tie.to_string(),
        r.seeds.null.to_string(),
        opt(r.sc_edges),
        opt(r.fc_edges),
        opt(r.n_components),
        opt(r.connected),
        opt(r.clustering),
        opt(r.path_length),
        opt(r.null_clustering),
        opt(r.null_path_length),
        opt(r.gamma),
        opt(r.lambda),
        opt(r.sigma),
    ]);
    row.resize(RESULT_COLUMNS.len(), NA.to_string());
    row
}

fn aggregate_row(c: &CellResult) -> Vec<String> {
    let a = &c.aggregates;
    let mut row = vec!["aggregate".to_string()];
    row.extend(params_fields(&c.params));
    row.resize(AGGREGATE_START, NA.to_string());
    row.extend([
        a.included.to_string(),
        a.count_defined.to_string(),
        a.count_sigma_gt_1.to_string(),
    ]);
    for (i, summary) in [&a.gamma, &a.lambda, &a.sigma].into_iter().enumerate() {
        // the sigma count is count_defined
        if i < 2 {
            row.push(summary.count.to_string());
        }
        row.extend([opt(summary.mean), opt(summary.median), opt(summary.std)]);
    }
    row.extend([opt(a.sign_test_p), opt(a.sign_test_above), opt(a.t_test_p)]);
    row
}

/// Render cells as a results table. `header_lines` become `# ` comments.
pub fn format_results(cells: &[CellResult], header_lines: &[String]) -> String {
    let mut out = String::new();
    for line in header_lines {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{}", RESULT_COLUMNS.join("\t"));
    for cell in cells {
        for r in &cell.records {
            let _ = writeln!(out, "{}", record_row(r).join("\t"));
        }
        let _ = writeln!(out, "{}", aggregate_row(cell).join("\t"));
    }
    out
}

struct Row<'a> {
    fields: Vec<&'a str>,
    line: usize,
    path: Option<&'a Path>,
}

impl<'a> Row<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.map(Path::to_path_buf),
            line: self.line,
            message: message.into(),
        }
    }

    fn raw(&self, col: &str) -> &'a str {
        let idx = RESULT_COLUMNS
            .iter()
            .position(|c| *c == col)
            .expect("known column");
        self.fields[idx]
    }

    fn get<T: FromStr>(&self, col: &str) -> Result<T> {
        let raw = self.raw(col);
        raw.parse()
            .map_err(|_| self.err(format!("column `{col}`: cannot parse `{raw}`")))
    }

    fn get_opt<T: FromStr>(&self, col: &str) -> Result<Option<T>> {
        if self.raw(col) == NA {
            Ok(None)
        } else {
            self.get(col).map(Some)
        }
    }

    fn params(&self) -> Result<CellParams> {
        Ok(CellParams {
            n: self.get("n")?,
            s: self.get("s")?,
            alpha: self.get("alpha")?,
            p_sc: self.get("p_sc")?,
            p_fc: self.get("p_fc")?,
        })
    }

    fn record(&self) -> Result<RealizationRecord> {
        Ok(RealizationRecord {
            params: self.params()?,
            realization: self.get("realization")?,
            status: RecordStatus::from_str(self.raw("status"))
                .map_err(|e| self.err(e.to_string()))?,
            seeds: CellSeeds {
                structure: self.get("structure_seed")?,
                noise: self.get("noise_seed")?,
                tie: self.get("tie_seed")?,
                null: self.get("null_seed")?,
            },
            sc_edges: self.get_opt("sc_edges")?,
            fc_edges: self.get_opt("fc_edges")?,
            n_components: self.get_opt("n_components")?,
            connected: self.get_opt("connected")?,
            clustering: self.get_opt("clustering")?,
            path_length: self.get_opt("path_length")?,
            null_clustering: self.get_opt("null_clustering")?,
            null_path_length: self.get_opt("null_path_length")?,
            gamma: self.get_opt("gamma")?,
            lambda: self.get_opt("lambda")?,
            sigma: self.get_opt("sigma")?,
            included: self.get("included")?,
        })
    }

    fn summary(&self, name: &str, count: usize) -> Result<IndexSummary> {
        Ok(IndexSummary {
            count,
            mean: self.get_opt(&format!("{name}_mean"))?,
            median: self.get_opt(&format!("{name}_median"))?,
            std: self.get_opt(&format!("{name}_std"))?,
        })
    }

    fn aggregates(&self) -> Result<CellAggregates> {
        let count_defined = self.get("count_defined")?;
        Ok(CellAggregates {
            included: self.get("count_included")?,
            gamma: self.summary("gamma", self.get("gamma_defined")?)?,
            lambda: self.summary("lambda", self.get("lambda_defined")?)?,
            sigma: self.summary("sigma", count_defined)?,
            count_defined,
            count_sigma_gt_1: self.get("count_sigma_gt_1")?,
            sign_test_p: self.get_opt("sign_test_p")?,
            sign_test_above: self.get_opt("sign_test_above")?,
            t_test_p: self.get_opt("t_test_p")?,
        })
    }
}

/// Read a results table back. Aggregates are taken as stored, not recomputed.
pub fn parse_results(text: &str, path: Option<&Path>) -> Result<Vec<CellResult>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let parse_err = |line, message: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        message,
    };
    match lines.next() {
        Some((_, header)) if header.split('\t').eq(RESULT_COLUMNS.iter().copied()) => {}
        Some((line, _)) => return Err(parse_err(line, "unexpected column header".into())),
        None => return Err(parse_err(0, "empty results table".into())),
    }

    let mut cells = Vec::new();
    let mut pending: Vec<RealizationRecord> = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != RESULT_COLUMNS.len() {
            return Err(parse_err(
                line,
                format!(
                    "expected {} fields, found {}",
                    RESULT_COLUMNS.len(),
                    fields.len()
                ),
            ));
        }
        let row = Row { fields, line, path };
        match row.raw("row") {
            "realization" => pending.push(row.record()?),
            "aggregate" => {
                let params = row.params()?;
                if let Some(bad) = pending.iter().find(|r| r.params != params) {
                    return Err(row.err(format!(
                        "realization {} belongs to a different cell than this aggregate row",
                        bad.realization
                    )));
                }
                cells.push(CellResult {
                    params,
                    records: std::mem::take(&mut pending),
                    aggregates: row.aggregates()?,
                });
            }
            other => return Err(row.err(format!("unknown row type `{other}`"))),
        }
    }
    if !pending.is_empty() {
        return Err(parse_err(
            text.lines().count(),
            "realization rows without an aggregate row".into(),
        ));
    }
    Ok(cells)
}
