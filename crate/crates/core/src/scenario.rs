//! Scenario files: one TOML document holding every block a command needs.
//!
//! A user file is merged key by key onto the embedded default scenario, so it
//! only lists what it changes. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qd::{QDConfig, QDMaterial};
use crate::scene::{SceneConfig, SEGMENT_COUNT};
use crate::spectrum::WavelengthGrid;
use crate::tracer::TraceConfig;

pub const DEFAULT_TOML: &str = include_str!("../config/default.toml");

/// Per-dot state used for the spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QdBlock {
    pub radius_nm: f64,
    pub temperature_k: f64,
    pub ambient_force_nn: f64,
}

/// Either an explicit list or `{ start, stop, count }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForceList {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl ForceList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ForceList::List(v) => v.clone(),
            ForceList::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumBlock {
    pub forces_nn: ForceList,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub forces_nn: ForceList,
    /// Segment indices whose force is swept, one calibration curve each.
    pub segments: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// ΔA in % of the amplitude at the ambient force.
    Ambient,
    /// Amplitude divided by the amplitude at `reference_force_nn`.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    pub peak_model: String,
    pub normalization: Normalization,
    pub reference_force_nn: f64,
    pub bin_width_nm: f64,
    pub saturation_tolerance_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub material: QDMaterial,
    pub qd: QdBlock,
    pub grid: WavelengthGrid,
    pub spectrum: SpectrumBlock,
    pub scene: SceneConfig,
    pub trace: TraceConfig,
    pub sweep: SweepBlock,
    pub analysis: AnalysisBlock,
    pub output: OutputBlock,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::from_toml_str("").expect("embedded default scenario is valid")
    }
}

fn merge(base: &mut toml::Value, user: toml::Value) {
    match (base, user) {
        (toml::Value::Table(b), toml::Value::Table(u)) => {
            for (k, v) in u {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// 1-based line of `field` (`section.key`) in a TOML source, if present.
pub fn field_line(src: &str, field: &str) -> Option<usize> {
    let mut parts = field.splitn(2, '.');
    let section = parts.next()?;
    let key = parts.next();
    let mut current = String::new();
    let mut section_line = None;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                section_line = Some(i + 1);
            }
            continue;
        }
        let Some((k, _)) = line.split_once('=') else { continue };
        let k = k.trim();
        match key {
            Some(key) => {
                let leaf = key.split('.').next().unwrap_or(key);
                if (current == section && k == leaf) || (current.is_empty() && k == format!("{section}.{leaf}")) {
                    return Some(i + 1);
                }
            }
            None if current.is_empty() && k == section => return Some(i + 1),
            None => {}
        }
    }
    section_line
}

fn with_line(src: &str, err: Error) -> Error {
    match err {
        Error::Config { field, message } => {
            let message = match field_line(src, &field) {
                Some(line) => format!("{message} (line {line})"),
                None => message,
            };
            Error::Config { field, message }
        }
        e => e,
    }
}

impl Scenario {
    /// Parses `src` merged onto the defaults, then validates.
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let mut base: toml::Value = toml::from_str(DEFAULT_TOML).map_err(|e| Error::ConfigParse(e.to_string()))?;
        let user: toml::Value = toml::from_str(src).map_err(|e| Error::ConfigParse(e.to_string()))?;
        merge(&mut base, user);
        let scenario: Scenario = serde_path_to_error::deserialize(base).map_err(|e| {
            let field = e.path().to_string();
            with_line(src, Error::config(field, e.into_inner().to_string()))
        })?;
        let scenario = scenario.resolved();
        scenario.validate().map_err(|e| with_line(src, e))?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::from_toml_str(&src).map_err(|e| match e {
            Error::ConfigParse(m) => Error::ConfigParse(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Fills derived fields (dot index of the scene from the material).
    fn resolved(mut self) -> Self {
        self.scene.qd_refractive_index = self.material.refractive_index;
        self
    }

    pub fn scene_config(&self) -> SceneConfig {
        let mut s = self.scene.clone();
        s.qd_refractive_index = self.material.refractive_index;
        s
    }

    pub fn qd_config(&self, force: f64) -> Result<QDConfig> {
        QDConfig::new(self.qd.radius_nm, force, self.qd.temperature_k)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        for (field, v) in [("qd.radius_nm", self.qd.radius_nm), ("qd.temperature_k", self.qd.temperature_k)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("must be > 0, got {v}")));
            }
        }
        if !(self.qd.ambient_force_nn.is_finite() && self.qd.ambient_force_nn >= 0.0) {
            return Err(Error::config("qd.ambient_force_nn", "must be >= 0"));
        }
        self.grid.validate()?;
        check_forces("spectrum.forces_nn", &self.spectrum.forces_nn.values())?;
        self.scene_config().validate()?;
        self.trace.validate()?;
        check_forces("sweep.forces_nn", &self.sweep.forces_nn.values())?;
        if let Some(s) = self.sweep.segments.iter().find(|s| **s >= SEGMENT_COUNT) {
            return Err(Error::config("sweep.segments", format!("segment {s} out of range 0..{SEGMENT_COUNT}")));
        }
        let a = &self.analysis;
        if !crate::analysis::PeakRegistry::default().contains(&a.peak_model) {
            return Err(Error::config("analysis.peak_model", format!("unknown peak model `{}`", a.peak_model)));
        }
        if !(a.bin_width_nm > 0.0) {
            return Err(Error::config("analysis.bin_width_nm", "must be > 0"));
        }
        if !(a.saturation_tolerance_pct >= 0.0) {
            return Err(Error::config("analysis.saturation_tolerance_pct", "must be >= 0"));
        }
        if !(a.reference_force_nn >= 0.0) {
            return Err(Error::config("analysis.reference_force_nn", "must be >= 0"));
        }
        Ok(())
    }

    /// SHA-256 of the resolved scenario serialized as JSON.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

fn check_forces(field: &str, forces: &[f64]) -> Result<()> {
    if forces.iter().any(|f| !(f.is_finite() && *f >= 0.0)) {
        return Err(Error::config(field, "forces must be finite and >= 0"));
    }
    if forces.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::config(field, "forces must be sorted"));
    }
    Ok(())
}
