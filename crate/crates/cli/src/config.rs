//! Versioned scenario documents.

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use homlab::qps::QpsScanGrid;
use homlab::sensing::{HomScenario, SensingScenario};
use homlab::{CoherentSpectrum, GaussianJointSpectrum, LossParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::figures::{FigureParams, Preset};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Standard-HOM rate curve.
    Hom,
    /// Modified-HOM rate surface at one phase.
    Mhom,
    /// Box-averaged modified-HOM surface next to its carrier-averaged form.
    Coarse,
    /// Carrier-averaged modified-HOM surface with path losses.
    Loss,
    /// Delay sensing from one control scan.
    Sense,
    /// Target recovery from the two-baseline scan.
    Qps,
    /// One of the figure presets.
    Figure,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hom => "hom",
            Mode::Mhom => "mhom",
            Mode::Coarse => "coarse",
            Mode::Loss => "loss",
            Mode::Sense => "sense",
            Mode::Qps => "qps",
            Mode::Figure => "figure",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    #[default]
    Bp,
    Cp,
}

/// Delay lattice `[min, max]` with `samples` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default = "default_min")]
    pub min: f64,
    #[serde(default = "default_max")]
    pub max: f64,
    #[serde(default)]
    pub samples: Option<usize>,
}

fn default_min() -> f64 {
    -3.0
}

fn default_max() -> f64 {
    3.0
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self { min: default_min(), max: default_max(), samples: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpsSpec {
    pub r: f64,
    pub gamma: f64,
    pub vartheta: f64,
    #[serde(default)]
    pub grid: QpsScanGrid,
    /// Also write the full control-scan surface.
    #[serde(default)]
    pub emit_surface: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub preset: Preset,
    #[serde(default)]
    pub params: FigureParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// File stem; defaults to the mode name.
    #[serde(default)]
    pub stem: Option<String>,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), stem: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub mode: Mode,
    #[serde(default)]
    pub source: SourceKind,
    /// Bi-photon spectrum; `ω₀ = 5`, `ΔΩ₊ = 0.2`, `ΔΩ₋ = 1` when absent.
    #[serde(default)]
    pub spectrum: Option<GaussianJointSpectrum>,
    /// Coherent pulse; unit intensity iso-spectral with `spectrum` when absent.
    #[serde(default)]
    pub coherent: Option<CoherentSpectrum>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub loss: Option<LossParams>,
    /// Box-averaging window of `coarse` mode.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub scan: ScanSpec,
    /// Offsets for `sense` mode.
    #[serde(default)]
    pub sensing: Option<SensingScenario>,
    /// Single-delay offset; `sense` with only this set locates the HOM zero.
    #[serde(default)]
    pub hom: Option<HomScenario>,
    #[serde(default)]
    pub qps: Option<QpsSpec>,
    #[serde(default)]
    pub figure: Option<FigureSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_theta() -> f64 {
    FRAC_PI_2
}

impl ScenarioConfig {
    /// Parse and check the schema version, reporting the failing field path.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "<document>".to_string() } else { path }, e.inner().to_string())
        })?;
        if cfg.version != SCHEMA_VERSION {
            return Err(CliError::config(
                "version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", cfg.version),
            ));
        }
        Ok(cfg)
    }

    pub fn spectrum(&self) -> GaussianJointSpectrum {
        self.spectrum.unwrap_or_else(|| GaussianJointSpectrum::new(5.0, 0.2, 1.0).expect("valid default"))
    }

    pub fn coherent(&self) -> Result<CoherentSpectrum, CliError> {
        match self.coherent {
            Some(c) => Ok(c),
            None => Ok(CoherentSpectrum::matching(&self.spectrum(), 1.0)?),
        }
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.mode.name().to_string())
    }

    pub(crate) fn require<'a, T>(&self, field: &'static str, value: &'a Option<T>) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| CliError::config(field, format!("required by mode `{}`", self.mode.name())))
    }
}
