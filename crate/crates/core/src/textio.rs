//! Plain-text file formats.
//!
//! * matrix: a line with `n`, then `n` rows of `n` whitespace-separated
//!   numbers. Floats are written with Rust's shortest round-trip
//!   representation, so reading a written file gives back identical bits.
//! * time series: header `n t_len`, then one row of `t_len` values per node.
//! * edge list: header `n m`, then `m` lines `i j` with 0-based `i < j`.
//!
//! Lines starting with `#` and blank lines are ignored by every reader, which
//! lets writers prepend a provenance comment.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fc::CorrelationMatrix;
use crate::graph::BinaryGraph;
use crate::model::TimeSeriesSample;

fn comment_block(out: &mut String, header: Option<&str>) {
    if let Some(h) = header {
        for line in h.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
}

pub fn format_matrix(m: &DMatrix<f64>, header: Option<&str>) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let _ = writeln!(out, "{}", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn format_graph_matrix(g: &BinaryGraph, header: Option<&str>) -> String {
    let n = g.n();
    let mut m = DMatrix::zeros(n, n);
    for (i, j) in g.edges() {
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
    }
    format_matrix(&m, header)
}

pub fn format_edge_list(g: &BinaryGraph, header: Option<&str>) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn format_timeseries(ts: &TimeSeriesSample, header: Option<&str>) -> String {
    let mut out = String::new();
    comment_block(&mut out, header);
    let _ = writeln!(out, "{} {}", ts.n(), ts.t_len());
    for i in 0..ts.n() {
        let row: Vec<String> = ts.series(i).iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Tokenized content lines with their 1-based line numbers.
struct Lines<'a> {
    path: Option<PathBuf>,
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: Option<&Path>) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(k, l)| {
                let t = l.trim();
                (!t.is_empty() && !t.starts_with('#'))
                    .then(|| (k + 1, t.split_whitespace().collect()))
            })
            .collect();
        Self {
            path: path.map(Path::to_path_buf),
            lines,
            pos: 0,
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.lines.last().map_or(1, |l| l.0);
        let item =
            self.lines.get(self.pos).cloned().ok_or_else(|| {
                self.err(last, format!("unexpected end of input, expected {what}"))
            })?;
        self.pos += 1;
        Ok(item)
    }

    fn expect_end(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((line, _)) => Err(self.err(*line, "unexpected trailing content")),
            None => Ok(()),
        }
    }

    fn header(&mut self, count: usize, what: &str) -> Result<Vec<usize>> {
        let (line, toks) = self.next_line(what)?;
        if toks.len() != count {
            return Err(self.err(line, format!("expected header `{what}`")));
        }
        toks.iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| self.err(line, format!("bad integer `{t}` in header")))
            })
            .collect()
    }

    fn float_row(&mut self, len: usize, what: &str) -> Result<Vec<f64>> {
        let (line, toks) = self.next_line(what)?;
        if toks.len() != len {
            return Err(self.err(line, format!("expected {len} values, found {}", toks.len())));
        }
        toks.iter()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| self.err(line, format!("bad number `{t}`")))
            })
            .collect()
    }
}

pub fn parse_matrix(text: &str, path: Option<&Path>) -> Result<DMatrix<f64>> {
    let mut lines = Lines::new(text, path);
    let n = lines.header(1, "n")?[0];
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in lines
            .float_row(n, &format!("matrix row {i}"))?
            .into_iter()
            .enumerate()
        {
            m[(i, j)] = v;
        }
    }
    lines.expect_end()?;
    Ok(m)
}

pub fn parse_timeseries(text: &str, path: Option<&Path>) -> Result<TimeSeriesSample> {
    let mut lines = Lines::new(text, path);
    let h = lines.header(2, "n t_len")?;
    let (n, t_len) = (h[0], h[1]);
    let mut values = Vec::with_capacity(n * t_len);
    for i in 0..n {
        values.extend(lines.float_row(t_len, &format!("series of node {i}"))?);
    }
    lines.expect_end()?;
    TimeSeriesSample::new(n, t_len, values, 0, 0)
}

pub fn parse_edge_list(text: &str, path: Option<&Path>) -> Result<BinaryGraph> {
    let mut lines = Lines::new(text, path);
    let h = lines.header(2, "n m")?;
    let (n, m) = (h[0], h[1]);
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for k in 0..m {
        let (line, toks) = lines.next_line(&format!("edge {k}"))?;
        if toks.len() != 2 {
            return Err(lines.err(line, "expected `i j`"));
        }
        let parse = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| lines.err(line, format!("bad node index `{t}`")))
        };
        let (i, j) = (parse(toks[0])?, parse(toks[1])?);
        if i >= j {
            return Err(lines.err(line, format!("edge `{i} {j}` must satisfy i < j")));
        }
        if j >= n {
            return Err(lines.err(line, format!("node {j} out of range for n = {n}")));
        }
        if !seen.insert((i, j)) {
            return Err(lines.err(line, format!("duplicate edge `{i} {j}`")));
        }
        edges.push((i, j));
    }
    lines.expect_end()?;
    BinaryGraph::from_edges(n, edges)
}

/// 0/1 symmetric matrix with zero diagonal as a graph.
pub fn graph_from_matrix(m: &DMatrix<f64>) -> Result<BinaryGraph> {
    let n = m.nrows();
    let mut edges = Vec::new();
    for i in 0..n {
        if m[(i, i)] != 0.0 {
            return Err(Error::invalid(format!("nonzero diagonal at node {i}")));
        }
        for j in i + 1..n {
            match (m[(i, j)], m[(j, i)]) {
                (a, b) if a != b => {
                    return Err(Error::invalid(format!(
                        "adjacency not symmetric at ({i}, {j})"
                    )))
                }
                (a, _) if a == 1.0 => edges.push((i, j)),
                (a, _) if a == 0.0 => {}
                (a, _) => {
                    return Err(Error::invalid(format!(
                        "adjacency entry ({i}, {j}) = {a} not 0/1"
                    )))
                }
            }
        }
    }
    BinaryGraph::from_edges(n, edges)
}

/// Content of a file given to `analyze`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisInput {
    Graph(BinaryGraph),
    Correlation(CorrelationMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// Edge list if the header has two integers, else a matrix; a 0/1 matrix
    /// with zero diagonal is a graph, anything else a correlation matrix.
    #[default]
    Auto,
    EdgeList,
    GraphMatrix,
    Correlation,
}

pub fn parse_analysis_input(
    text: &str,
    path: Option<&Path>,
    format: InputFormat,
) -> Result<AnalysisInput> {
    let format = match format {
        InputFormat::Auto => {
            let header_tokens = Lines::new(text, path)
                .lines
                .first()
                .map_or(0, |l| l.1.len());
            if header_tokens == 2 {
                InputFormat::EdgeList
            } else {
                let m = parse_matrix(text, path)?;
                let binary = m.iter().all(|&v| v == 0.0 || v == 1.0)
                    && (0..m.nrows()).all(|i| m[(i, i)] == 0.0);
                return if binary {
                    graph_from_matrix(&m).map(AnalysisInput::Graph)
                } else {
                    CorrelationMatrix::new(m).map(AnalysisInput::Correlation)
                };
            }
        }
        f => f,
    };
    match format {
        InputFormat::EdgeList => parse_edge_list(text, path).map(AnalysisInput::Graph),
        InputFormat::GraphMatrix => {
            graph_from_matrix(&parse_matrix(text, path)?).map(AnalysisInput::Graph)
        }
        InputFormat::Correlation => {
            CorrelationMatrix::new(parse_matrix(text, path)?).map(AnalysisInput::Correlation)
        }
        InputFormat::Auto => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_layout() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 1.0]);
        assert_eq!(format_matrix(&m, None), "2\n1 0.25\n0.25 1\n");
        let with_header = format_matrix(&m, Some("fcsw test"));
        assert!(with_header.starts_with("# fcsw test\n2\n"));
        assert_eq!(parse_matrix(&with_header, None).unwrap(), m);
    }

    #[test]
    fn edge_list_layout() {
        let g = BinaryGraph::from_edges(4, [(0, 1), (2, 3), (1, 2)]).unwrap();
        let text = format_edge_list(&g, None);
        assert_eq!(text, "4 3\n0 1\n1 2\n2 3\n");
        assert_eq!(parse_edge_list(&text, None).unwrap(), g);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_matrix("# c\n2\n1 0\n0 x\n", Some(Path::new("m.txt"))).unwrap_err();
        match err {
            Error::Parse {
                line, ref message, ..
            } => {
                assert_eq!(line, 4);
                assert!(message.contains("bad number"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().starts_with("m.txt:4:"));

        let err = parse_edge_list("3 2\n0 1\n2 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n", None),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_matrix("2\n1 0\n0 1\n5\n", None),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn auto_detection() {
        let k3 = "3\n0 1 1\n1 0 1\n1 1 0\n";
        assert_eq!(
            parse_analysis_input(k3, None, InputFormat::Auto).unwrap(),
            AnalysisInput::Graph(BinaryGraph::complete(3))
        );
        let corr = "2\n1 0.3\n0.3 1\n";
        assert!(matches!(
            parse_analysis_input(corr, None, InputFormat::Auto).unwrap(),
            AnalysisInput::Correlation(_)
        ));
        let el = "3 1\n0 2\n";
        assert!(matches!(
            parse_analysis_input(el, None, InputFormat::Auto).unwrap(),
            AnalysisInput::Graph(_)
        ));
    }

    #[test]
    fn timeseries_layout() {
        let ts = TimeSeriesSample::new(2, 3, vec![1.0, 2.0, 3.0, -1.5, 0.0, 2.25], 0, 0).unwrap();
        let text = format_timeseries(&ts, None);
        assert_eq!(text, "2 3\n1 2 3\n-1.5 0 2.25\n");
        assert_eq!(parse_timeseries(&text, None).unwrap().values(), ts.values());
    }

    proptest! {
        #[test]
        fn matrix_round_trip_is_bit_exact(vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 9)) {
            let m = DMatrix::from_row_slice(3, 3, &vals);
            let back = parse_matrix(&format_matrix(&m, Some("x")), None).unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
