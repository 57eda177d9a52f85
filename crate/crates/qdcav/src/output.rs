//! CSV spectra, JSON sidecars and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qdcav_core::bath_correlation::BathCorrelation;
use qdcav_core::resonance::{Pole, ResonanceReport, VrsClass};
use qdcav_core::spectra::{fnv1a, Spectrum, SpectrumWarning};
use serde_json::{json, Value};

use crate::error::AppError;

pub const CSV_HEADER: &str = "omega,intensity,kind";

pub fn warning_text(w: &SpectrumWarning) -> String {
    match w {
        SpectrumWarning::Validity { g, delta_ph } => format!("validity: g = {g} is not small against delta_ph = {delta_ph}"),
        SpectrumWarning::TransformTail { max_fraction } => format!("transform tail carries {max_fraction:e} of the integral"),
        SpectrumWarning::NegativeClipped { relative } => format!("negative values clipped (largest {relative:e} of the maximum)"),
        SpectrumWarning::Empty => "spectrum is identically zero".to_string(),
    }
}

/// `omega,intensity,kind` rows after `#` metadata lines. Floats use the
/// shortest round-trip representation, so equal spectra give equal bytes.
pub fn spectrum_csv(s: &Spectrum, meta: &[(&str, String)]) -> String {
    let mut out = String::with_capacity(48 * s.omega.len() + 512);
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    let _ = writeln!(out, "# scale = {:e}", s.scale);
    let _ = writeln!(out, "# fingerprint = {:016x}", s.fingerprint);
    for w in &s.warnings {
        let _ = writeln!(out, "# warning = {}", warning_text(w));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    let kind = s.kind.as_str();
    for (w, v) in s.omega.iter().zip(&s.intensity) {
        let _ = writeln!(out, "{w:e},{v:e},{kind}");
    }
    out
}

/// Rows of `bath.csv`.
pub fn bath_csv(bath: &BathCorrelation, meta: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str("t,re_q,im_q,re_gg,im_gg,re_gu,im_gu\n");
    for (t, q, g, u) in bath.samples() {
        let _ = writeln!(out, "{t:e},{:e},{:e},{:e},{:e},{:e},{:e}", q.re, q.im, g.re, g.im, u.re, u.im);
    }
    out
}

/// Parsed `omega,intensity,kind` file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSpectrum {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<(f64, f64, String)>,
}

pub fn parse_spectrum_csv(text: &str) -> Result<CsvSpectrum, String> {
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    let mut header = false;
    for (n, line) in text.lines().enumerate() {
        if let Some(m) = line.strip_prefix("# ") {
            if let Some((k, v)) = m.split_once(" = ") {
                meta.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if !header {
            if line != CSV_HEADER {
                return Err(format!("line {}: expected `{CSV_HEADER}`", n + 1));
            }
            header = true;
            continue;
        }
        let mut cols = line.split(',');
        let mut num = |what: &str| -> Result<f64, String> {
            cols.next().ok_or(format!("line {}: missing {what}", n + 1))?.parse::<f64>().map_err(|e| format!("line {}: {what}: {e}", n + 1))
        };
        let w = num("omega")?;
        let v = num("intensity")?;
        let kind = cols.next().ok_or(format!("line {}: missing kind", n + 1))?.to_string();
        rows.push((w, v, kind));
    }
    if !header {
        return Err("no header line".into());
    }
    Ok(CsvSpectrum { meta, rows })
}

fn pole_json(p: &Option<Pole>) -> Value {
    match p {
        Some(p) => json!({ "omega": p.omega, "width": p.width, "strength": p.strength }),
        None => Value::Null,
    }
}

pub fn vrs_name(v: VrsClass) -> &'static str {
    match v {
        VrsClass::Underdamped => "underdamped",
        VrsClass::Overdamped => "overdamped",
        VrsClass::Marginal => "marginal",
    }
}

pub fn resonance_json(r: &ResonanceReport, temperature: f64) -> Value {
    let evidence = r.evidence.as_ref().map(|e| {
        json!({
            "gamma_probe": e.gamma_probe,
            "l1_to_polaron": e.l1_to_polaron,
            "peaks": e.peaks,
            "doublet": e.doublet,
            "class": vrs_name(e.class),
        })
    });
    json!({
        "temperature": temperature,
        "g": r.g,
        "gamma": r.gamma,
        "mean_b": r.mean_b,
        "plus": pole_json(&r.plus),
        "minus": pole_json(&r.minus),
        "roots": { "plus": r.roots.plus, "minus": r.roots.minus },
        "splitting": r.splitting,
        "splitting_estimate": r.splitting_estimate,
        "compound_strength": r.compound_strength,
        "compound_strength_estimate": r.compound_strength_estimate,
        "uniqueness_guaranteed": r.guaranteed,
        "evidence": evidence,
        "thresholds": [r.thresholds.0, r.thresholds.1],
        "vrs": vrs_name(r.vrs),
    })
}

/// One written file as listed in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub path: PathBuf,
    pub kind: String,
    pub temperature: Option<f64>,
    pub rows: usize,
    pub fingerprint: Option<u64>,
    pub content_hash: u64,
}

impl Written {
    pub fn json(&self, root: &Path) -> Value {
        let rel = self.path.strip_prefix(root).unwrap_or(&self.path);
        json!({
            "file": rel.to_string_lossy(),
            "kind": self.kind,
            "temperature": self.temperature,
            "rows": self.rows,
            "fingerprint": self.fingerprint.map(|f| format!("{f:016x}")),
            "fnv1a": format!("{:016x}", self.content_hash),
        })
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<u64, AppError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| AppError::io(path, e))?;
    Ok(fnv1a(bytes))
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}
