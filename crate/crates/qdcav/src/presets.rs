//! Compiled-in scenarios.

use crate::config::{ModelConfig, ModelKind, OutputsConfig, ParamsConfig, ScenarioConfig, Temperatures, WindowConfig};
use crate::error::ConfigError;

pub const NAMES: [&str; 6] = ["fig1", "fig2_ohmic", "fig2_superohmic", "jc", "ohmic_threshold", "delta_sidebands"];

fn with_out(mut cfg: ScenarioConfig, name: &str) -> ScenarioConfig {
    cfg.paths.output = format!("out/{name}").into();
    cfg
}

pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    match name {
        // n = 3 bulk density, Δ = 2ω_b, T = 0.1ω_b, γ = 0⁺
        "fig1" => {
            cfg.params = ParamsConfig { g: 0.05, gamma: 0.0, temperature: Temperatures::One(0.1), ..Default::default() };
        }
        "fig2_ohmic" | "fig2_superohmic" => {
            cfg.model = ModelConfig {
                kind: ModelKind::Confined,
                n: if name == "fig2_ohmic" { 1 } else { 3 },
                delta: 3.0,
                linewidth: 0.06,
                ..Default::default()
            };
            cfg.params = ParamsConfig {
                g: 3e-3,
                gamma: 1e-4,
                temperature: Temperatures::Many(vec![0.0, 0.05]),
                ..Default::default()
            };
            cfg.grid.inset = Some(WindowConfig { min: -0.01, max: 0.01, points: 2001 });
            cfg.outputs.emission = false;
        }
        "jc" => {
            cfg.model = ModelConfig { kind: ModelKind::None, ..Default::default() };
            cfg.params = ParamsConfig { g: 0.05, gamma: 0.005, temperature: Temperatures::One(0.0), ..Default::default() };
            cfg.grid.min = Some(-0.2);
            cfg.grid.max = Some(0.2);
            cfg.grid.points = 801;
            cfg.outputs = OutputsConfig { emission: false, ..Default::default() };
        }
        "ohmic_threshold" => {
            cfg.model = ModelConfig { kind: ModelKind::Ohmic, delta: 0.5, ..Default::default() };
            cfg.params = ParamsConfig { g: 0.05, gamma: 0.0, temperature: Temperatures::One(0.0), ..Default::default() };
        }
        "delta_sidebands" => {
            cfg.model = ModelConfig { kind: ModelKind::Delta, delta: 1.0, ..Default::default() };
            cfg.params = ParamsConfig { g: 0.01, gamma: 1e-4, temperature: Temperatures::One(0.0), ..Default::default() };
            cfg.grid.min = Some(-1.0);
            cfg.grid.max = Some(3.0);
            cfg.grid.points = 40001;
            cfg.outputs.emission = false;
        }
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    }
    Ok(with_out(cfg, name))
}
