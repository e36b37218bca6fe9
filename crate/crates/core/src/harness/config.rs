//! Flat `section.key = value` configuration with a fixed schema.
//!
//! ```text
//! # comment
//! run.preset = cosine-bump
//! run.epsilon = 0.1
//! sweep.epsilons = 0.1, 0.05, 0.025
//! ```
//!
//! | key | default |
//! |---|---|
//! | `model.gamma`, `model.alpha`, `model.c_alpha` | 2, −1, 0.25 |
//! | `run.preset` | required |
//! | `run.epsilon` | required by `simulate` |
//! | `run.tau`, `run.samples`, `run.well_prepared`, `run.seed` | 0.2, 20, true, 0 |
//! | `sweep.epsilons` | required by `sweep` |
//! | `grid.base_cells`, `grid.base_epsilon`, `grid.max_cells`, `grid.cells` | 256, 0.1, 8192, rule |
//! | `scheme.cfl`, `scheme.reconstruction` | 0.5, linear |
//! | `euler.refine`, `euler.cfl`, `euler.blowup_threshold` | 4, 0.5, 50 |
//! | `layer.c`, `layer.s` | 1, 0.9 s_max |
//! | `nls.epsilon`, `nls.t_end`, `nls.ek_cells`, `nls.cells`, `nls.dt`, `nls.samples` | 0.5, 0.2, 256,512, 512, 2e-5, 2 |
//! | `gn.dims`, `gn.alphas`, `gn.draws` | 1,2,3, −0.5,0,1, 100 |
//! | `identities.count` | 100 |

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::presets::Preset;
use crate::boundary_layer::{s_max, LayerParams};
use crate::ek::Reconstruction;
use crate::nls::OracleConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `section.key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    Duplicate(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub gamma: f64,
    pub alpha: f64,
    pub c_alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub preset: Preset,
    pub epsilon: Option<f64>,
    pub tau: f64,
    pub samples: usize,
    pub well_prepared: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRule {
    pub base_cells: usize,
    pub base_epsilon: f64,
    pub max_cells: usize,
    pub cells: Option<usize>,
}

impl GridRule {
    /// `round(base_cells · base_epsilon / ε)`, clamped to `[16, max_cells]`,
    /// unless `cells` pins it.
    pub fn cells_for(&self, epsilon: f64) -> usize {
        if let Some(n) = self.cells {
            return n;
        }
        let n = (self.base_cells as f64 * self.base_epsilon / epsilon).round() as usize;
        n.clamp(16, self.max_cells)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSection {
    pub cfl: f64,
    pub reconstruction: Reconstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerSection {
    pub refine: usize,
    pub cfl: f64,
    pub blowup_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnSection {
    pub dims: Vec<usize>,
    pub alphas: Vec<f64>,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub model: ModelSection,
    pub run: RunSection,
    pub sweep_epsilons: Vec<f64>,
    pub grid: GridRule,
    pub scheme: SchemeSection,
    pub euler: EulerSection,
    pub layer: LayerParams,
    pub nls: OracleConfig,
    pub gn: GnSection,
    pub identities_count: usize,
}

impl Default for Config {
    fn default() -> Self {
        let alpha = -1.0;
        Self {
            model: ModelSection {
                gamma: 2.0,
                alpha,
                c_alpha: 0.25,
            },
            run: RunSection {
                preset: Preset::CosineBump,
                epsilon: None,
                tau: 0.2,
                samples: 20,
                well_prepared: true,
                seed: 0,
            },
            sweep_epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            grid: GridRule {
                base_cells: 256,
                base_epsilon: 0.1,
                max_cells: 8192,
                cells: None,
            },
            scheme: SchemeSection {
                cfl: 0.5,
                reconstruction: Reconstruction::Linear,
            },
            euler: EulerSection {
                refine: 4,
                cfl: 0.5,
                blowup_threshold: 50.0,
            },
            layer: LayerParams::default_for(1, alpha),
            nls: OracleConfig::default(),
            gn: GnSection {
                dims: vec![1, 2, 3],
                alphas: vec![-0.5, 0.0, 1.0],
                draws: 100,
            },
            identities_count: 100,
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| ConfigError::BadValue {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

impl Config {
    /// Parses the flat format; `run.preset` is required.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: ln + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if !k.contains('.') || v.is_empty() {
                return Err(ConfigError::Syntax { line: ln + 1 });
            }
            if kv.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate(k.to_string()));
            }
        }
        let mut c = Config::default();
        let mut layer_s = None;
        if !kv.contains_key("run.preset") {
            return Err(ConfigError::Missing("run.preset"));
        }
        for (k, v) in &kv {
            let k = k.as_str();
            match k {
                "model.gamma" => c.model.gamma = num(k, v)?,
                "model.alpha" => c.model.alpha = num(k, v)?,
                "model.c_alpha" => c.model.c_alpha = num(k, v)?,
                "run.preset" => {
                    c.run.preset = Preset::parse(v).ok_or_else(|| bad(k, format!("unknown preset `{v}`")))?
                }
                "run.epsilon" => c.run.epsilon = Some(num(k, v)?),
                "run.tau" => c.run.tau = num(k, v)?,
                "run.samples" => c.run.samples = num(k, v)?,
                "run.well_prepared" => c.run.well_prepared = num(k, v)?,
                "run.seed" => c.run.seed = num(k, v)?,
                "sweep.epsilons" => c.sweep_epsilons = list(k, v)?,
                "grid.base_cells" => c.grid.base_cells = num(k, v)?,
                "grid.base_epsilon" => c.grid.base_epsilon = num(k, v)?,
                "grid.max_cells" => c.grid.max_cells = num(k, v)?,
                "grid.cells" => c.grid.cells = Some(num(k, v)?),
                "scheme.cfl" => c.scheme.cfl = num(k, v)?,
                "scheme.reconstruction" => {
                    c.scheme.reconstruction =
                        Reconstruction::parse(v).ok_or_else(|| bad(k, format!("unknown reconstruction `{v}`")))?
                }
                "euler.refine" => c.euler.refine = num(k, v)?,
                "euler.cfl" => c.euler.cfl = num(k, v)?,
                "euler.blowup_threshold" => c.euler.blowup_threshold = num(k, v)?,
                "layer.c" => c.layer.c = num(k, v)?,
                "layer.s" => layer_s = Some(num(k, v)?),
                "nls.epsilon" => c.nls.epsilon = num(k, v)?,
                "nls.t_end" => c.nls.t_end = num(k, v)?,
                "nls.ek_cells" => c.nls.ek_cells = list(k, v)?,
                "nls.cells" => c.nls.nls_cells = num(k, v)?,
                "nls.dt" => c.nls.nls_dt = num(k, v)?,
                "nls.samples" => c.nls.samples = num(k, v)?,
                "gn.dims" => c.gn.dims = list(k, v)?,
                "gn.alphas" => c.gn.alphas = list(k, v)?,
                "gn.draws" => c.gn.draws = num(k, v)?,
                "identities.count" => c.identities_count = num(k, v)?,
                _ => return Err(ConfigError::UnknownKey(k.to_string())),
            }
        }
        c.layer.s = layer_s.unwrap_or(0.9 * s_max(1, c.model.alpha));
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        crate::state::StateFunctions::new(self.model.gamma, self.model.alpha, self.model.c_alpha, 1.0)
            .map_err(|e| bad("model", e.to_string()))?;
        self.layer
            .validate(1, self.model.alpha)
            .map_err(|e| bad("layer.s", e.to_string()))?;
        if let Some(e) = self.run.epsilon {
            if !(e > 0.0) {
                return Err(bad("run.epsilon", "must be > 0"));
            }
        }
        if !(self.run.tau > 0.0) {
            return Err(bad("run.tau", "must be > 0"));
        }
        if self.run.samples < 2 {
            return Err(bad("run.samples", "need at least 2 intervals"));
        }
        if self.sweep_epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(bad("sweep.epsilons", "must be > 0"));
        }
        if self.euler.refine == 0 || !self.euler.refine.is_multiple_of(2) {
            return Err(bad("euler.refine", "must be even"));
        }
        if !(self.scheme.cfl > 0.0 && self.scheme.cfl <= 1.0) {
            return Err(bad("scheme.cfl", "must lie in (0, 1]"));
        }
        if self.grid.cells.is_some_and(|n| n < 8) || self.grid.max_cells < 16 {
            return Err(bad("grid", "too few cells"));
        }
        if self.gn.dims.iter().any(|d| !(1..=3).contains(d)) {
            return Err(bad("gn.dims", "dimensions must lie in 1..=3"));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> Result<f64, ConfigError> {
        self.run.epsilon.ok_or(ConfigError::Missing("run.epsilon"))
    }

    pub fn state(&self, epsilon: f64) -> crate::state::StateFunctions {
        crate::state::StateFunctions::new(self.model.gamma, self.model.alpha, self.model.c_alpha, epsilon)
            .expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = Config::parse("run.preset = constant\n").unwrap();
        assert_eq!(c.run.preset, Preset::Constant);
        assert!((c.layer.s - 0.45).abs() < 1e-15);
        assert_eq!(c.grid.cells_for(0.0125), 2048);
        assert_eq!(c.grid.cells_for(0.1), 256);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Config::parse("run.epsilon = 0.1"),
            Err(ConfigError::Missing("run.preset"))
        );
        assert!(matches!(
            Config::parse("run.preset = constant\nrun.colour = red"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            Config::parse("run.preset constant"),
            Err(ConfigError::Syntax { line: 1 })
        ));
        assert!(matches!(
            Config::parse("run.preset = constant\nlayer.s = 0.6"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            Config::parse("run.preset = constant\nrun.preset = constant"),
            Err(ConfigError::Duplicate(_))
        ));
    }

    #[test]
    fn lists_and_comments() {
        let c = Config::parse("run.preset = cosine-bump # bump\nsweep.epsilons = 0.1, 0.05,0.025\n").unwrap();
        assert_eq!(c.sweep_epsilons, vec![0.1, 0.05, 0.025]);
    }
}
