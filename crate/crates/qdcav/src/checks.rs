//! Cross-checks of the frequency-domain spectra against the independent
//! solvers in `qdcav_core::oracle`.

use qdcav_core::oracle::{exact_absorption, exact_lines, time_domain_spectrum, DiscreteBath, DiscreteMode, TimeDomainOptions};
use qdcav_core::spectra::{FrequencyGrid, Segment, SpectrumEngine};
use qdcav_core::spectral_density::PhononModel;
use serde_json::{json, Value};

use crate::config::OracleConfig;
use crate::error::AppError;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        CheckOutcome { name: name.to_string(), measured, tolerance, passed: measured <= tolerance, detail }
    }

    pub fn json(&self) -> Value {
        json!({
            "name": self.name,
            "measured": if self.measured.is_finite() { json!(self.measured) } else { json!(self.measured.to_string()) },
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        })
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {:.3e} (tolerance {:.1e}) {}", self.name, self.measured, self.tolerance, self.detail)
    }
}

fn max_relative(a: impl Iterator<Item = f64>, b: impl Iterator<Item = f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max)
}

/// Symmetric worst distance between two sets of line positions.
pub fn position_mismatch(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_way = |x: &[f64], y: &[f64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Peaks of the analytic spectrum on a fine window around `center`.
pub fn analytic_peaks(engine: &SpectrumEngine, center: f64, half: f64, floor: f64) -> Vec<f64> {
    let grid = FrequencyGrid { segments: vec![Segment::span(center - half, center + half, 12001)] };
    engine.absorption(&grid).peaks(floor).into_iter().map(|p| p.0).collect()
}

/// Exact lines in a window, keeping those above `floor` of the window's
/// heaviest line.
pub fn exact_peaks(bath: &DiscreteBath, g: f64, temperature: f64, center: f64, half: f64, floor: f64) -> Result<Vec<f64>, AppError> {
    let lines = exact_lines(bath, g, temperature).map_err(|e| AppError::core("exact diagonalization", e))?;
    let inside: Vec<_> = lines.into_iter().filter(|l| (l.omega - center).abs() < half).collect();
    let top = inside.iter().map(|l| l.weight).fold(0.0, f64::max);
    Ok(inside.into_iter().filter(|l| l.weight > floor * top).map(|l| l.omega).collect())
}

pub fn discrete_bath(model: &PhononModel, fock_cutoff: usize) -> Option<DiscreteBath> {
    match model {
        PhononModel::DeltaMode { lines } if !lines.is_empty() => Some(DiscreteBath {
            modes: lines.iter().map(|l| DiscreteMode { omega: l.omega, lambda: l.coupling }).collect(),
            fock_cutoff,
        }),
        _ => None,
    }
}

/// Runs the checks that apply to the engine's model.
pub fn oracle_checks(engine: &SpectrumEngine, cfg: &OracleConfig) -> Result<Vec<CheckOutcome>, AppError> {
    let p = engine.params().clone();
    let model = engine.spectral_density().model().clone();
    let scale = if engine.g_tilde() > 0.0 { engine.g_tilde() } else { p.g.max(p.gamma()).max(1e-3) };
    let probe = if cfg.points == 1 {
        FrequencyGrid::points(&[0.0])
    } else {
        FrequencyGrid::uniform(-cfg.span * scale, cfg.span * scale, cfg.points)
    };
    let mut out = Vec::new();
    if engine.spectral_density().is_phonon_free() {
        let bath = DiscreteBath { modes: Vec::new(), fock_cutoff: 0 };
        let exact = exact_absorption(&bath, &p, &probe).map_err(|e| AppError::core("exact absorption", e))?;
        let analytic = engine.absorption(&probe);
        let err = max_relative(analytic.raw(), exact.raw());
        out.push(CheckOutcome::new("two-line limit", err, 1e-6, format!("{} points", probe.len())));
        return Ok(out);
    }
    if let Some(bath) = discrete_bath(&model, cfg.fock_cutoff) {
        let t = p.temperature;
        let half = 3.0 * p.g.max(engine.g_tilde());
        let first = bath.modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min);
        for (name, center) in [("exact zero-phonon positions", 0.0), ("exact first-sideband positions", first)] {
            let ed = exact_peaks(&bath, p.g, t, center, half, 0.01)?;
            let an = analytic_peaks(engine, center, half, 0.01);
            let err = position_mismatch(&ed, &an);
            out.push(CheckOutcome::new(name, err, cfg.position_tolerance, format!("exact {ed:?} analytic {an:?}")));
        }
        return Ok(out);
    }
    let opts = TimeDomainOptions { step: cfg.step, t_end: cfg.t_end, ..Default::default() };
    let td = time_domain_spectrum(engine, &probe, &opts).map_err(|e| AppError::core("time-domain integration", e))?;
    let fd = engine.absorption(&probe);
    let err = max_relative(td.raw(), fd.raw());
    out.push(CheckOutcome::new("time-domain equivalence", err, cfg.tolerance, format!("{} points over ±{}·{scale:.4}", probe.len(), cfg.span)));
    Ok(out)
}
