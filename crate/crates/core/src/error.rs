use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate normalization: SC + alpha*I has zero spectral radius")]
    DegenerateNormalization,

    #[error("numeric failure: {message}")]
    Numeric {
        message: String,
        condition_estimate: Option<f64>,
    },

    #[error("degenerate series: node {node} has zero variance")]
    DegenerateSeries { node: usize },

    #[error("{}:{line}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("{key}: {message}")]
    Config { key: String, message: String },

    #[error("missing cells: {}", .0.join("; "))]
    MissingCells(Vec<String>),

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric {
            message: msg.into(),
            condition_estimate: None,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable category, printed by the CLI as `error[<category>]`.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegenerateNormalization => "degenerate-normalization",
            Error::Numeric { .. } => "numeric",
            Error::DegenerateSeries { .. } => "degenerate-series",
            Error::Parse { .. } => "parse",
            Error::Config { .. } => "config",
            Error::MissingCells(_) => "missing-cells",
            Error::Usage(_) => "usage",
            Error::Io { .. } => "io",
        }
    }
}
