//! Sweep configuration: the TOML file layout and its validated form.
//!
//! Keys (all top level; unknown keys are rejected):
//!
//! | key | type | default |
//! |-----|------|---------|
//! | `n_values` | list of integers >= 3 | required |
//! | `s_values` | list of reals in (0, 1) | required |
//! | `alpha_values` | list of reals >= 0 | required |
//! | `p_sc_values`, `p_fc_values` | list of densities in (0, 1], or `"grid24"` | required |
//! | `realizations` | integer >= 1 | 20 |
//! | `mode` | `"asymptotic"` or `"finite"` | `"asymptotic"` |
//! | `t_len` | integer >= 3, finite mode only | required when finite |
//! | `burn_in` | integer, finite mode only | `max(1000, ceil(20 / (1 - s)))` |
//! | `null_model` | `"er"`, `"er_gnp"`, `"maslov_sneppen"` | `"er"` |
//! | `swap_factor` | real > 0 | 10 |
//! | `null_realizations` | integer >= 1 | 1 |
//! | `sc_weights` | `"binary"`, `"uniform01"`, `"halfnormal"` | `"binary"` |
//! | `threshold` | `"signed"`, `"absolute"` | `"signed"` |
//! | `path_convention` | `"finite_pairs"`, `"largest_component"` | `"finite_pairs"` |
//! | `connected_only` | bool | false |
//! | `master_seed` | unsigned 64-bit integer | none; `--seed` or this key is required |

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::default_density_grid;
use crate::error::{Error, Result};
use crate::fc::ThresholdMode;
use crate::graph::PathConvention;
use crate::model::WeightDistribution;
use crate::nullmodels::{NullModel, DEFAULT_SWAP_FACTOR};

pub const DEFAULT_REALIZATIONS: usize = 20;

/// Work units (cells x realizations) above which the CLI warns about runtime.
pub const LARGE_SWEEP_UNITS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScWeights {
    #[default]
    Binary,
    Uniform01,
    HalfNormal,
}

impl ScWeights {
    pub fn distribution(self) -> Option<WeightDistribution> {
        match self {
            ScWeights::Binary => None,
            ScWeights::Uniform01 => Some(WeightDistribution::Uniform01),
            ScWeights::HalfNormal => Some(WeightDistribution::HalfNormal),
        }
    }
}

impl FromStr for ScWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(Self::Binary),
            "uniform01" => Ok(Self::Uniform01),
            "halfnormal" => Ok(Self::HalfNormal),
            other => Err(Error::invalid(format!("unknown sc_weights `{other}`"))),
        }
    }
}

impl fmt::Display for ScWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Binary => "binary",
            Self::Uniform01 => "uniform01",
            Self::HalfNormal => "halfnormal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SimulationMode {
    /// Exact stationary correlation from `(I - A^2)^{-1}`.
    Asymptotic,
    /// Pearson correlation of a simulated sample.
    Finite {
        t_len: usize,
        burn_in: Option<usize>,
    },
}

/// Everything about a realization except its grid coordinates and seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineOptions {
    pub mode: SimulationMode,
    pub null_model: NullModel,
    pub swap_factor: f64,
    pub null_realizations: usize,
    pub sc_weights: ScWeights,
    pub threshold: ThresholdMode,
    pub path_convention: PathConvention,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            mode: SimulationMode::Asymptotic,
            null_model: NullModel::Er,
            swap_factor: DEFAULT_SWAP_FACTOR,
            null_realizations: 1,
            sc_weights: ScWeights::Binary,
            threshold: ThresholdMode::Signed,
            path_convention: PathConvention::FinitePairs,
        }
    }
}

/// Validated sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub s_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub p_sc_values: Vec<f64>,
    pub p_fc_values: Vec<f64>,
    pub realizations: usize,
    pub options: PipelineOptions,
    pub connected_only: bool,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn cell_count(&self) -> usize {
        self.n_values.len()
            * self.s_values.len()
            * self.alpha_values.len()
            * self.p_sc_values.len()
            * self.p_fc_values.len()
    }

    pub fn work_units(&self) -> usize {
        self.cell_count() * self.realizations
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum DensityList {
    Values(Vec<f64>),
    Named(String),
}

impl DensityList {
    fn resolve(&self, key: &str) -> Result<Vec<f64>> {
        match self {
            DensityList::Values(v) => Ok(v.clone()),
            DensityList::Named(name) if name == "grid24" => Ok(default_density_grid()),
            DensityList::Named(name) => Err(Error::Config {
                key: key.into(),
                message: format!("unknown named grid `{name}` (expected \"grid24\" or a list)"),
            }),
        }
    }
}

/// Raw file contents. Every field is optional here so that command-line
/// flags can fill or override them before validation.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfigFile {
    pub n_values: Option<Vec<usize>>,
    pub s_values: Option<Vec<f64>>,
    pub alpha_values: Option<Vec<f64>>,
    pub p_sc_values: Option<DensityList>,
    pub p_fc_values: Option<DensityList>,
    pub realizations: Option<usize>,
    pub mode: Option<String>,
    pub t_len: Option<usize>,
    pub burn_in: Option<usize>,
    pub null_model: Option<NullModel>,
    pub swap_factor: Option<f64>,
    pub null_realizations: Option<usize>,
    pub sc_weights: Option<ScWeights>,
    pub threshold: Option<ThresholdMode>,
    pub path_convention: Option<PathConvention>,
    pub connected_only: Option<bool>,
    pub master_seed: Option<u64>,
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn required<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| config_err(key, "missing required key"))
}

fn check_list<T: Copy + fmt::Display>(
    key: &str,
    values: &[T],
    ok: impl Fn(T) -> bool,
    rule: &str,
) -> Result<()> {
    if values.is_empty() {
        return Err(config_err(key, "list must not be empty"));
    }
    if let Some(bad) = values.iter().find(|&&v| !ok(v)) {
        return Err(config_err(key, format!("value {bad} violates {rule}")));
    }
    let distinct: HashSet<String> = values.iter().map(|v| v.to_string()).collect();
    if distinct.len() != values.len() {
        return Err(config_err(key, "values must be distinct"));
    }
    Ok(())
}

impl SweepConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let key = message
                .strip_prefix("unknown field `")
                .and_then(|rest| rest.split('`').next())
                .map(str::to_string)
                .or_else(|| e.span().map(|s| format!("byte {}", s.start)))
                .unwrap_or_else(|| "config".into());
            config_err(&key, message.trim())
        })
    }

    pub fn validate(&self) -> Result<SweepConfig> {
        let n_values = required(&self.n_values, "n_values")?;
        check_list("n_values", &n_values, |n| n >= 3, "n >= 3")?;
        let s_values = required(&self.s_values, "s_values")?;
        check_list("s_values", &s_values, |s| s > 0.0 && s < 1.0, "0 < s < 1")?;
        let alpha_values = required(&self.alpha_values, "alpha_values")?;
        check_list(
            "alpha_values",
            &alpha_values,
            |a| a >= 0.0 && a.is_finite(),
            "alpha >= 0",
        )?;
        let p_sc_values = required(&self.p_sc_values, "p_sc_values")?.resolve("p_sc_values")?;
        check_list(
            "p_sc_values",
            &p_sc_values,
            |p| p > 0.0 && p <= 1.0,
            "0 < density <= 1",
        )?;
        let p_fc_values = required(&self.p_fc_values, "p_fc_values")?.resolve("p_fc_values")?;
        check_list(
            "p_fc_values",
            &p_fc_values,
            |p| p > 0.0 && p <= 1.0,
            "0 < density <= 1",
        )?;

        let realizations = self.realizations.unwrap_or(DEFAULT_REALIZATIONS);
        if realizations == 0 {
            return Err(config_err("realizations", "must be at least 1"));
        }

        let mode = match self.mode.as_deref().unwrap_or("asymptotic") {
            "asymptotic" => {
                for (key, set) in [
                    ("t_len", self.t_len.is_some()),
                    ("burn_in", self.burn_in.is_some()),
                ] {
                    if set {
                        return Err(config_err(key, "only valid with mode = \"finite\""));
                    }
                }
                SimulationMode::Asymptotic
            }
            "finite" => {
                let t_len = required(&self.t_len, "t_len")?;
                if t_len < 3 {
                    return Err(config_err("t_len", "must be at least 3"));
                }
                SimulationMode::Finite {
                    t_len,
                    burn_in: self.burn_in,
                }
            }
            other => {
                return Err(config_err(
                    "mode",
                    format!("unknown mode `{other}` (expected asymptotic or finite)"),
                ))
            }
        };

        let swap_factor = self.swap_factor.unwrap_or(DEFAULT_SWAP_FACTOR);
        if !(swap_factor > 0.0 && swap_factor.is_finite()) {
            return Err(config_err("swap_factor", "must be a positive number"));
        }
        let null_realizations = self.null_realizations.unwrap_or(1);
        if null_realizations == 0 {
            return Err(config_err("null_realizations", "must be at least 1"));
        }
        let master_seed = self.master_seed.ok_or_else(|| {
            config_err(
                "master_seed",
                "no seed given: pass --seed or set master_seed",
            )
        })?;

        Ok(SweepConfig {
            n_values,
            s_values,
            alpha_values,
            p_sc_values,
            p_fc_values,
            realizations,
            options: PipelineOptions {
                mode,
                null_model: self.null_model.unwrap_or_default(),
                swap_factor,
                null_realizations,
                sc_weights: self.sc_weights.unwrap_or_default(),
                threshold: self.threshold.unwrap_or_default(),
                path_convention: self.path_convention.unwrap_or_default(),
            },
            connected_only: self.connected_only.unwrap_or(false),
            master_seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
n_values = [20]
s_values = [0.5]
alpha_values = [1.0]
p_sc_values = [0.2]
p_fc_values = [0.1]
realizations = 2
master_seed = 7
"#;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_defaults() {
        let cfg = SweepConfigFile::from_toml(MINIMAL)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(cfg.cell_count(), 1);
        assert_eq!(cfg.work_units(), 2);
        assert_eq!(cfg.options, PipelineOptions::default());
        assert!(!cfg.connected_only);
    }

    #[test]
    fn named_grid() {
        let text = MINIMAL.replace("p_fc_values = [0.1]", "p_fc_values = \"grid24\"");
        let cfg = SweepConfigFile::from_toml(&text)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(cfg.p_fc_values.len(), 24);
        let text = MINIMAL.replace("p_fc_values = [0.1]", "p_fc_values = \"grid7\"");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "p_fc_values"
        );
    }

    #[test]
    fn invalid_density_names_key() {
        let text = MINIMAL.replace("p_fc_values = [0.1]", "p_fc_values = [1.5]");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "p_fc_values"
        );
    }

    #[test]
    fn unknown_key_rejected() {
        let text = format!("{MINIMAL}\ncolour = 3\n");
        assert_eq!(
            key_of(SweepConfigFile::from_toml(&text).unwrap_err()),
            "colour"
        );
    }

    #[test]
    fn finite_mode_requires_length() {
        let text = format!("{MINIMAL}\nmode = \"finite\"\n");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "t_len"
        );
        let text = format!("{MINIMAL}\nmode = \"finite\"\nt_len = 300\n");
        let cfg = SweepConfigFile::from_toml(&text)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(
            cfg.options.mode,
            SimulationMode::Finite {
                t_len: 300,
                burn_in: None
            }
        );
        let text = format!("{MINIMAL}\nt_len = 300\n");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "t_len"
        );
    }

    #[test]
    fn missing_seed_is_an_error() {
        let text = MINIMAL.replace("master_seed = 7", "");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "master_seed"
        );
    }

    #[test]
    fn duplicate_values_rejected() {
        let text = MINIMAL.replace("s_values = [0.5]", "s_values = [0.5, 0.5]");
        assert_eq!(
            key_of(
                SweepConfigFile::from_toml(&text)
                    .unwrap()
                    .validate()
                    .unwrap_err()
            ),
            "s_values"
        );
    }
}
