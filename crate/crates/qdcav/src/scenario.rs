//! The `run`, `validate` and `oracle` pipelines.

use std::path::{Path, PathBuf};

use qdcav_core::bath_correlation::BathOptions;
use qdcav_core::half_fourier::HalfTransform;
use qdcav_core::resonance::pole_approximation;
use qdcav_core::spectra::{validity, Spectrum, SpectrumEngine, Validity, VALIDITY_WARN};
use qdcav_core::spectral_density::{HuangRhys, SpectralDensity};
use serde_json::{json, Value};

use crate::checks::{oracle_checks, CheckOutcome};
use crate::config::ScenarioConfig;
use crate::error::AppError;
use crate::output::{bath_csv, pretty, resonance_json, spectrum_csv, warning_text, write_file, Written};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub written: Vec<Written>,
    pub checks: Vec<CheckOutcome>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn temperature_dir(out: &Path, t: f64, sweep: bool) -> PathBuf {
    if sweep {
        out.join(format!("T{t}"))
    } else {
        out.to_path_buf()
    }
}

/// Spectral density after the validity gate.
fn density(cfg: &ScenarioConfig) -> Result<SpectralDensity, AppError> {
    cfg.check()?;
    let model = cfg.model.to_model()?;
    if cfg.params.g > 0.0 && validity(&model, cfg.params.g) == Validity::Violated {
        return Err(AppError::Validity { g: cfg.params.g, delta_ph: model.delta_ph() });
    }
    SpectralDensity::new(model).map_err(|e| AppError::core("model", e))
}

pub fn engine_at(sd: &SpectralDensity, cfg: &ScenarioConfig, temperature: f64) -> Result<SpectrumEngine, AppError> {
    let ctx = format!("bath correlation at T = {temperature}");
    let tr = HalfTransform::new(sd, temperature).map_err(|e| AppError::core(ctx, e))?;
    SpectrumEngine::from_parts(sd.clone(), cfg.params.system(temperature), tr).map_err(|e| AppError::core("params", e))
}

fn derived(sd: &SpectralDensity, g: f64, temperature: f64) -> Result<Value, AppError> {
    let s = sd.scalars(temperature).map_err(|e| AppError::core("bath scalars", e))?;
    let huang_rhys = match s.huang_rhys {
        HuangRhys::Finite(v) => json!(v),
        HuangRhys::Divergent => json!("divergent"),
    };
    Ok(json!({
        "temperature": temperature,
        "polaron_shift": s.delta,
        "huang_rhys": huang_rhys,
        "mean_b": s.mean_b,
        "mean_b_squared": s.mean_b * s.mean_b,
        "g_tilde": g * s.mean_b,
        "delta_ph": sd.model().delta_ph(),
    }))
}

struct Sink<'a> {
    root: &'a Path,
    written: Vec<Written>,
    warnings: Vec<String>,
    quiet: bool,
}

impl Sink<'_> {
    fn put(&mut self, path: PathBuf, kind: &str, temperature: Option<f64>, rows: usize, fingerprint: Option<u64>, text: &str) -> Result<(), AppError> {
        let content_hash = write_file(&path, text.as_bytes())?;
        if !self.quiet {
            eprintln!("wrote {}", path.display());
        }
        self.written.push(Written { path, kind: kind.to_string(), temperature, rows, fingerprint, content_hash });
        Ok(())
    }

    fn spectrum(&mut self, dir: &Path, name: &str, t: f64, s: &Spectrum, meta: &[(&str, String)]) -> Result<(), AppError> {
        for w in &s.warnings {
            self.warnings.push(format!("{name} at T = {t}: {}", warning_text(w)));
        }
        let text = spectrum_csv(s, meta);
        self.put(dir.join(name), s.kind.as_str(), Some(t), s.omega.len(), Some(s.fingerprint), &text)
    }
}

/// Computes every requested output for every temperature and writes them
/// under `out` together with `manifest.json`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path, quiet: bool) -> Result<Outcome, AppError> {
    let sd = density(cfg)?;
    let temps = cfg.temperatures();
    let sweep = temps.len() > 1;
    let mut sink = Sink { root: out, written: Vec::new(), warnings: Vec::new(), quiet };
    let mut checks = Vec::new();
    let mut scalars = Vec::new();
    let model_text = format!("{:?}", sd.model());
    for &t in &temps {
        let dir = temperature_dir(out, t, sweep);
        let engine = engine_at(&sd, cfg, t)?;
        scalars.push(derived(&sd, cfg.params.g, t)?);
        let grid = cfg.grid.build(&engine)?;
        let p = engine.params();
        let meta = [
            ("qdcav", VERSION.to_string()),
            ("model", model_text.clone()),
            ("g", format!("{:e}", p.g)),
            ("gamma", format!("{:e}", p.gamma())),
            ("temperature", format!("{t:e}")),
            ("emission_regularization", format!("{:e}", p.emission_regularization)),
            ("mean_b", format!("{:e}", engine.mean_b())),
            ("g_tilde", format!("{:e}", engine.g_tilde())),
        ];
        if cfg.outputs.absorption {
            sink.spectrum(&dir, "absorption.csv", t, &engine.absorption(&grid), &meta)?;
        }
        if cfg.outputs.emission {
            let s = engine.emission(&grid).map_err(|e| AppError::core("emission", e))?;
            sink.spectrum(&dir, "emission.csv", t, &s, &meta)?;
        }
        if cfg.outputs.polaron {
            let width = cfg.params.polaron_width();
            let s = engine.polaron_spectrum(width, &grid).map_err(|e| AppError::core("polaron spectrum", e))?;
            let mut m = meta.to_vec();
            m.push(("polaron_gamma", format!("{width:e}")));
            sink.spectrum(&dir, "polaron.csv", t, &s, &m)?;
        }
        if cfg.outputs.resonance_report {
            let r = pole_approximation(&engine).map_err(|e| AppError::core("pole approximation", e))?;
            sink.put(dir.join("resonance.json"), "resonance", Some(t), 1, None, &pretty(&resonance_json(&r, t)))?;
        }
        if cfg.outputs.bath_debug {
            if let Some(bath) = engine.transforms().bath() {
                let text = bath_csv(bath, &meta);
                sink.put(dir.join("bath.csv"), "bath", Some(t), bath.times().len(), None, &text)?;
            }
        }
        if cfg.outputs.oracle_check {
            let found = oracle_checks(&engine, &cfg.oracle)?;
            let v: Vec<Value> = found.iter().map(|c| c.json()).collect();
            sink.put(dir.join("oracle.json"), "oracle", Some(t), v.len(), None, &pretty(&json!({ "temperature": t, "checks": v })))?;
            checks.extend(found);
        }
    }
    let manifest = manifest(cfg, &sink, &scalars, &checks);
    let mut outcome = Outcome { out_dir: out.to_path_buf(), written: Vec::new(), checks, warnings: Vec::new() };
    let path = out.join("manifest.json");
    write_file(&path, pretty(&manifest).as_bytes())?;
    if !quiet {
        eprintln!("wrote {}", path.display());
    }
    outcome.written = sink.written;
    outcome.warnings = sink.warnings;
    Ok(outcome)
}

fn manifest(cfg: &ScenarioConfig, sink: &Sink<'_>, scalars: &[Value], checks: &[CheckOutcome]) -> Value {
    let bath = BathOptions::default();
    json!({
        "tool": "qdcav",
        "version": VERSION,
        "core_version": qdcav_core::VERSION,
        "config": cfg.to_toml(),
        "derived": scalars,
        "tolerances": {
            "emission_regularization": cfg.params.emission_regularization,
            "validity_warn_fraction": VALIDITY_WARN,
            "bath_floor": bath.floor,
            "bath_grade": bath.grade,
            "bath_t_max": bath.t_max,
            "bath_t_lines": bath.t_lines,
            "oracle": {
                "points": cfg.oracle.points,
                "span": cfg.oracle.span,
                "tolerance": cfg.oracle.tolerance,
                "step": cfg.oracle.step,
                "t_end": cfg.oracle.t_end,
                "fock_cutoff": cfg.oracle.fock_cutoff,
                "position_tolerance": cfg.oracle.position_tolerance,
            },
        },
        "files": sink.written.iter().map(|w| w.json(sink.root)).collect::<Vec<_>>(),
        "checks": checks.iter().map(|c| c.json()).collect::<Vec<_>>(),
        "warnings": sink.warnings,
    })
}

/// Oracle checks at every temperature, without writing spectra.
pub fn run_oracle(cfg: &ScenarioConfig) -> Result<Vec<(f64, CheckOutcome)>, AppError> {
    let sd = density(cfg)?;
    let mut out = Vec::new();
    for t in cfg.temperatures() {
        let engine = engine_at(&sd, cfg, t)?;
        for c in oracle_checks(&engine, &cfg.oracle)? {
            out.push((t, c));
        }
    }
    Ok(out)
}

/// Derived scalars and validity diagnostics; never fails on physics.
pub fn validate(cfg: &ScenarioConfig) -> Result<Vec<String>, AppError> {
    cfg.check()?;
    let model = cfg.model.to_model()?;
    let g = cfg.params.g;
    let mut lines = vec![format!("model: {model:?}")];
    let sd = match SpectralDensity::new(model.clone()) {
        Ok(sd) => sd,
        Err(e) => {
            lines.push(format!("error: {e}"));
            return Ok(lines);
        }
    };
    lines.push(format!("polaron shift Delta = {}", sd.delta()));
    for t in cfg.temperatures() {
        match sd.scalars(t) {
            Ok(s) => {
                let hr = match s.huang_rhys {
                    HuangRhys::Finite(v) => format!("{v:.6}"),
                    HuangRhys::Divergent => "DIVERGENT".to_string(),
                };
                lines.push(format!(
                    "T = {t}: S = {hr}, <B> = {:.6}, <B>^2 = {:.6}, g_tilde = {:.6}",
                    s.mean_b,
                    s.mean_b * s.mean_b,
                    g * s.mean_b
                ));
            }
            Err(e) => lines.push(format!("T = {t}: error: {e}")),
        }
    }
    let d = model.delta_ph();
    lines.push(match validity(&model, g) {
        Validity::Ok => format!("validity: ok (g = {g}, delta_ph = {d})"),
        Validity::Warn => format!("warning: validity: g = {g} exceeds {VALIDITY_WARN} delta_ph = {}", VALIDITY_WARN * d),
        Validity::Violated => format!("warning: validity violated: g = {g} >= delta_ph = {d}"),
    });
    Ok(lines)
}
