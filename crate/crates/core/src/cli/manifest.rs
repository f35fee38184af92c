use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::VERSION;

/// Record of one command invocation, written as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub master_seed: Option<u64>,
    /// Fully resolved parameters.
    pub parameters: serde_json::Value,
    /// Every file the command wrote, including the manifest itself.
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

pub(crate) struct ManifestBuilder {
    command: &'static str,
    master_seed: Option<u64>,
    parameters: serde_json::Value,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl ManifestBuilder {
    pub(crate) fn new(
        command: &'static str,
        master_seed: Option<u64>,
        parameters: serde_json::Value,
    ) -> Self {
        Self {
            command,
            master_seed,
            parameters,
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    /// First line of every output file's header comment.
    pub(crate) fn header_lines(&self) -> Vec<String> {
        vec![
            format!("fcsw {VERSION} {}", self.command),
            format!("parameters {}", self.parameters),
        ]
    }

    pub(crate) fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(path);
        Ok(())
    }

    pub(crate) fn record(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.outputs.extend(paths);
    }

    /// Finish the manifest and write it to `path` when given.
    pub(crate) fn finish(mut self, path: Option<PathBuf>) -> Result<RunManifest> {
        if let Some(p) = &path {
            self.outputs.push(p.clone());
        }
        let manifest = RunManifest {
            command: self.command.to_string(),
            version: VERSION.to_string(),
            master_seed: self.master_seed,
            parameters: self.parameters,
            outputs: self.outputs,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        if let Some(p) = path {
            let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            json.push('\n');
            std::fs::write(&p, json).map_err(|e| Error::io(&p, e))?;
        }
        Ok(manifest)
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
