// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": {"paper": {"lambda": 0.0, "eta": 0.0, "epsilon": 0.0, "omega": 10.0}},
//!   "grid": {"nx": 81, "ny": 81},
//!   "scan": {"parameter": "lambda", "from": 0.0, "to": 2.0, "steps": 41},
//!   "spectroscopy": {"noise_sigma": 0.05, "seed": 1},
//!   "frequency_axis": {"min": 0.0, "max": 25.0, "step": 0.01},
//!   "nodes": {"seed_grid_n": 64, "tol": 1e-8, "loop_radius": 0.3},
//!   "symmetry": {"grid_n": 64, "tol": 1e-10},
//!   "output": {"dir": "out", "write_traces": true}
//! }
//! ```
//!
//! Only `model` is required. A custom model replaces `"paper"` with
//! `"custom": {"omega": 10, "parameters": {...}, "g1": [...], "g2": [...], "g3": [...]}`
//! where each term is `{"m": 1, "n": 0, "kind": "sin", "coefficient": {"constant": 1.0, "params": {"lambda": 1.0}}}`.
//! Unknown keys anywhere are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiment::InstrumentProfile;
use crate::model::{BlochModel, HarmonicTerm, Params};
use crate::symmetry;
use crate::topology;

fn default_omega() -> f64 {
    10.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperModelConfig {
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomModelConfig {
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default)]
    pub parameters: Params,
    #[serde(default)]
    pub g1: Vec<HarmonicTerm>,
    #[serde(default)]
    pub g2: Vec<HarmonicTerm>,
    #[serde(default)]
    pub g3: Vec<HarmonicTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Paper(PaperModelConfig),
    Custom(CustomModelConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { nx: 81, ny: 81 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl ScanConfig {
    /// `steps` evenly spaced values from `from` to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / last)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyAxisConfig {
    /// MHz.
    pub min: f64,
    /// MHz.
    pub max: f64,
    /// MHz.
    pub step: f64,
}

impl FrequencyAxisConfig {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step).round() as usize + 1;
        (0..n).map(|i| self.min + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub seed_grid_n: usize,
    pub tol: f64,
    pub loop_radius: f64,
}

impl Default for NodeConfig {
    fn default() -> Self {
        Self {
            seed_grid_n: topology::DEFAULT_SEED_GRID_N,
            tol: topology::NODE_TOL,
            loop_radius: topology::DEFAULT_LOOP_RADIUS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryConfig {
    pub grid_n: usize,
    pub tol: f64,
}

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self {
            grid_n: symmetry::DEFAULT_GRID_N,
            tol: symmetry::DEFAULT_TOL,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Write raw spectroscopy traces (large) in addition to fitted results.
    #[serde(default = "default_true")]
    pub write_traces: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            write_traces: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectroscopy: Option<InstrumentProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_axis: Option<FrequencyAxisConfig>,
    #[serde(default)]
    pub nodes: NodeConfig,
    #[serde(default)]
    pub symmetry: SymmetryConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn build_model(&self) -> Result<BlochModel> {
        match &self.model {
            ModelSource::Paper(p) => BlochModel::paper(p.lambda, p.eta, p.epsilon, p.omega)
                .map_err(|e| Error::config("/model/paper", e.to_string())),
            ModelSource::Custom(c) => BlochModel::new(
                c.g1.clone(),
                c.g2.clone(),
                c.g3.clone(),
                c.omega,
                c.parameters.clone(),
            )
            .map_err(|e| Error::config("/model/custom", e.to_string())),
        }
    }

    /// Instrument profile with defaults when the section is absent.
    pub fn profile(&self) -> InstrumentProfile {
        self.spectroscopy.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.build_model()?;
        if let ModelSource::Paper(p) = &self.model {
            if !(p.omega > 0.0) {
                return Err(Error::config("/model/paper/omega", "must be positive"));
            }
        }
        if self.grid.nx < 2 {
            return Err(Error::config("/grid/nx", "must be at least 2"));
        }
        if self.grid.ny < 2 {
            return Err(Error::config("/grid/ny", "must be at least 2"));
        }
        if let Some(scan) = &self.scan {
            if !model.parameter_names().contains(&scan.parameter) {
                return Err(Error::config(
                    "/scan/parameter",
                    format!("unknown parameter `{}`", scan.parameter),
                ));
            }
            if !(scan.from.is_finite() && scan.to.is_finite()) {
                return Err(Error::config("/scan", "bounds must be finite"));
            }
            if scan.to < scan.from {
                return Err(Error::config("/scan/to", "must not be below `from`"));
            }
            if scan.steps == 0 {
                return Err(Error::config("/scan/steps", "must be at least 1"));
            }
        }
        if let Some(profile) = &self.spectroscopy {
            profile
                .validate()
                .map_err(|e| Error::config("/spectroscopy", e.to_string()))?;
        }
        if let Some(axis) = &self.frequency_axis {
            if !(axis.step > 0.0 && axis.max > axis.min && axis.min.is_finite() && axis.max.is_finite()) {
                return Err(Error::config("/frequency_axis", "need min < max and step > 0"));
            }
        }
        if self.nodes.seed_grid_n < 32 {
            return Err(Error::config("/nodes/seed_grid_n", "must be at least 32"));
        }
        if !(self.nodes.tol > 0.0) {
            return Err(Error::config("/nodes/tol", "must be positive"));
        }
        if !(self.nodes.loop_radius > 0.0) {
            return Err(Error::config("/nodes/loop_radius", "must be positive"));
        }
        if self.symmetry.grid_n < 8 {
            return Err(Error::config("/symmetry/grid_n", "must be at least 8"));
        }
        if !(self.symmetry.tol > 0.0) {
            return Err(Error::config("/symmetry/tol", "must be positive"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Parses and validates a JSON run configuration, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = json_pointer(e.path());
        Error::config(
            if path.is_empty() { "/".to_owned() } else { path },
            e.inner().to_string(),
        )
    })?;
    config.validate()?;
    Ok(config)
}
