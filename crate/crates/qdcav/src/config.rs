//! Scenario files.
//!
//! A scenario is one TOML document with the sections `[model]`, `[params]`,
//! `[grid]`, `[outputs]`, `[oracle]` and `[paths]`. Every key has a default
//! and unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use qdcav_core::spectra::{FrequencyGrid, Segment, SpectrumEngine, SystemParams};
use qdcav_core::spectral_density::{DeltaLine, PhononModel, UvCutoff};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, ConfigError};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub outputs: OutputsConfig,
    pub oracle: OracleConfig,
    pub paths: PathsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ohmic,
    Bulk,
    Confined,
    Delta,
    /// `J ≡ 0`.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// Power-law tail for `n <= 3`, hard edge above.
    Auto,
    Hard,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineConfig {
    pub omega: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Polaron shift `Δ`.
    pub delta: f64,
    pub omega_b: f64,
    /// Low-frequency exponent of a confined mode.
    pub n: u32,
    /// Confined-mode width `J̃`.
    pub linewidth: f64,
    pub cutoff: CutoffKind,
    /// Defaults to `20 omega_b`.
    pub omega_star: Option<f64>,
    /// Explicit lines for `kind = "delta"`; empty means one mode at
    /// `omega_b` carrying `delta`.
    pub lines: Vec<LineConfig>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: ModelKind::Bulk,
            delta: 2.0,
            omega_b: 1.0,
            n: 3,
            linewidth: 2.0,
            cutoff: CutoffKind::Auto,
            omega_star: None,
            lines: Vec::new(),
        }
    }
}

impl ModelConfig {
    pub fn to_model(&self) -> Result<PhononModel, ConfigError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(ConfigError::field(format!("model.{name}"), format!("must be finite and > 0, got {v}")))
            }
        };
        let model = match self.kind {
            ModelKind::Ohmic => PhononModel::ohmic(positive("delta", self.delta)?, positive("omega_b", self.omega_b)?),
            ModelKind::Bulk => PhononModel::bulk(positive("delta", self.delta)?, positive("omega_b", self.omega_b)?),
            ModelKind::Confined => PhononModel::confined(
                self.n,
                positive("delta", self.delta)?,
                positive("omega_b", self.omega_b)?,
                positive("linewidth", self.linewidth)?,
            ),
            ModelKind::Delta if self.lines.is_empty() => {
                PhononModel::delta_mode(positive("delta", self.delta)?, positive("omega_b", self.omega_b)?)
            }
            ModelKind::Delta => PhononModel::DeltaMode {
                lines: self.lines.iter().map(|l| DeltaLine { omega: l.omega, coupling: l.coupling }).collect(),
            },
            ModelKind::None => PhononModel::phonon_free(),
        };
        let star = match self.omega_star {
            Some(v) => positive("omega_star", v)?,
            None => 20.0 * self.omega_b,
        };
        let cutoff = match self.cutoff {
            CutoffKind::Auto if self.omega_star.is_none() => return Ok(model),
            CutoffKind::Auto => match &model {
                PhononModel::ConfinedMode { n, .. } if *n > 3 => UvCutoff::Hard { omega_star: star },
                _ => UvCutoff::PowerLaw { omega_star: star },
            },
            CutoffKind::Hard => UvCutoff::Hard { omega_star: star },
            CutoffKind::PowerLaw => UvCutoff::PowerLaw { omega_star: star },
        };
        Ok(model.with_cutoff(cutoff))
    }
}

/// One temperature or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Temperatures {
    One(f64),
    Many(Vec<f64>),
}

impl Temperatures {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Temperatures::One(t) => vec![*t],
            Temperatures::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub g: f64,
    /// Shared loss rate; `gamma_c` and `gamma_qd` override it.
    pub gamma: f64,
    pub gamma_c: Option<f64>,
    pub gamma_qd: Option<f64>,
    pub detuning: f64,
    pub temperature: Temperatures,
    pub emission_regularization: f64,
    /// ZPL width of the `g = 0` spectrum when `gamma = 0`.
    pub polaron_gamma: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig {
            g: 0.05,
            gamma: 0.0,
            gamma_c: None,
            gamma_qd: None,
            detuning: 0.0,
            temperature: Temperatures::One(0.1),
            emission_regularization: 1e-6,
            polaron_gamma: 0.01,
        }
    }
}

impl ParamsConfig {
    pub fn system(&self, temperature: f64) -> SystemParams {
        SystemParams {
            g: self.g,
            gamma_c: self.gamma_c.unwrap_or(self.gamma),
            gamma_qd: self.gamma_qd.unwrap_or(self.gamma),
            detuning: self.detuning,
            temperature,
            emission_regularization: self.emission_regularization,
        }
    }

    /// Width of the polaron spectrum.
    pub fn polaron_width(&self) -> f64 {
        let g = self.gamma_c.unwrap_or(self.gamma);
        if g > 0.0 {
            g
        } else {
            self.polaron_gamma
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Without `min`/`max` the grid spans `±1.5 max(Δ, 3ω_b)` with an inset of
/// `±3g̃` around the ZPL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: usize,
    pub inset: Option<WindowConfig>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { min: None, max: None, points: 4001, inset: None }
    }
}

fn window(name: &str, lo: f64, hi: f64, points: usize) -> Result<Segment, ConfigError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ConfigError::field(name, format!("needs finite min < max, got [{lo}, {hi}]")));
    }
    if points < 2 {
        return Err(ConfigError::field(name, format!("needs at least 2 points, got {points}")));
    }
    Ok(Segment::span(lo, hi, points))
}

impl GridConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        match (self.min, self.max) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                window("grid", lo, hi, self.points)?;
            }
            _ => return Err(ConfigError::field("grid", "set both min and max, or neither")),
        }
        if let Some(w) = self.inset {
            window("grid.inset", w.min, w.max, w.points)?;
        }
        Ok(())
    }

    pub fn build(&self, engine: &SpectrumEngine) -> Result<FrequencyGrid, ConfigError> {
        let mut grid = match (self.min, self.max) {
            (None, None) => {
                let mut g = engine.default_grid();
                if self.inset.is_some() {
                    g.segments.truncate(1);
                }
                g
            }
            (Some(lo), Some(hi)) => FrequencyGrid { segments: vec![window("grid", lo, hi, self.points)?] },
            _ => return Err(ConfigError::field("grid", "set both min and max, or neither")),
        };
        if let Some(w) = self.inset {
            grid.segments.push(window("grid.inset", w.min, w.max, w.points)?);
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    pub absorption: bool,
    /// Needs `gamma = 0`.
    pub emission: bool,
    pub polaron: bool,
    pub resonance_report: bool,
    pub oracle_check: bool,
    /// `bath.csv` with `Q(t)`, `G_g(t)` and `G_u(t)` on the time grid.
    pub bath_debug: bool,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            absorption: true,
            emission: true,
            polaron: true,
            resonance_report: true,
            oracle_check: false,
            bath_debug: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    /// Probe frequencies of the time-domain check, spread over
    /// `±span·g̃`.
    pub points: usize,
    pub span: f64,
    /// Relative tolerance of the time-domain check.
    pub tolerance: f64,
    pub step: f64,
    pub t_end: f64,
    /// Fock cutoff of the exact-diagonalization check (delta modes).
    pub fock_cutoff: usize,
    /// Peak-position tolerance of the exact-diagonalization check.
    pub position_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            points: 11,
            span: 2.0,
            tolerance: 0.01,
            step: 1.0,
            t_end: 1e5,
            fock_cutoff: 12,
            position_tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub output: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig { output: PathBuf::from("out") }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        ScenarioConfig::from_toml(&text).map_err(|e| AppError::Config { path: Some(path.to_path_buf()), source: e })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario configs always serialize")
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.params.temperature.values()
    }

    /// Checks that need no numerics.
    pub fn check(&self) -> Result<(), ConfigError> {
        self.model.to_model()?;
        let ts = self.temperatures();
        if ts.is_empty() {
            return Err(ConfigError::field("params.temperature", "the sweep is empty"));
        }
        if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(ConfigError::field("params.temperature", format!("must be finite and >= 0, got {t}")));
        }
        self.params.system(ts[0]).validate().map_err(|e| ConfigError::field("params", e.to_string()))?;
        if !(self.params.polaron_gamma > 0.0 && self.params.polaron_gamma.is_finite()) {
            return Err(ConfigError::field("params.polaron_gamma", "must be finite and > 0"));
        }
        if self.outputs.emission && self.params.system(0.0).gamma() != 0.0 {
            return Err(ConfigError::field("outputs.emission", "emission is defined for gamma = 0 only"));
        }
        self.grid.check()?;
        let o = &self.oracle;
        if o.points == 0 || !(o.span > 0.0 && o.tolerance > 0.0 && o.step > 0.0 && o.t_end > o.step) {
            return Err(ConfigError::field("oracle", "needs points >= 1 and positive span, tolerance, step < t_end"));
        }
        Ok(())
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Ohmic => "ohmic",
            ModelKind::Bulk => "bulk",
            ModelKind::Confined => "confined",
            ModelKind::Delta => "delta",
            ModelKind::None => "none",
        };
        f.write_str(s)
    }
}
