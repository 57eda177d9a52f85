//! Weak-probe absorption and emission spectra of the dot-cavity system in the
//! polaron frame, on frequency grids measured from the zero-phonon line.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::half_fourier::{HalfTransform, TransformValue, TAIL_WARN};
use crate::spectral_density::{PhononModel, SpectralDensity};

/// Warn when `g` exceeds this fraction of `δ_ph`.
pub const VALIDITY_WARN: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Dot-cavity coupling `g`.
    pub g: f64,
    pub gamma_c: f64,
    pub gamma_qd: f64,
    /// `ω_eg - Δ - ω_c`; only resonance is supported.
    pub detuning: f64,
    pub temperature: f64,
    /// Width `γ_eff` used in place of `γ = 0` in the transforms.
    pub emission_regularization: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            g: 0.05,
            gamma_c: 0.0,
            gamma_qd: 0.0,
            detuning: 0.0,
            temperature: 0.0,
            emission_regularization: 1e-6,
        }
    }
}

impl SystemParams {
    pub fn new(g: f64, gamma: f64, temperature: f64) -> Self {
        SystemParams { g, gamma_c: gamma, gamma_qd: gamma, temperature, ..Default::default() }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_c
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.gamma_c, self.gamma_qd, self.temperature, self.emission_regularization];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::UnsupportedParams(
                "g, gamma_c, gamma_qd, temperature and emission_regularization must be finite and >= 0".into(),
            ));
        }
        if self.emission_regularization == 0.0 {
            return Err(Error::UnsupportedParams("emission_regularization must be > 0".into()));
        }
        if self.gamma_c != self.gamma_qd {
            return Err(Error::UnsupportedParams(format!(
                "gamma_c ({}) and gamma_qd ({}) must be equal",
                self.gamma_c, self.gamma_qd
            )));
        }
        if self.detuning != 0.0 {
            return Err(Error::UnsupportedParams("only the resonant case detuning = 0 is implemented".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Ok,
    /// `g > 0.3 δ_ph`.
    Warn,
    /// `g >= δ_ph`.
    Violated,
}

/// Checks `g ≪ δ_ph`.
pub fn validity(model: &PhononModel, g: f64) -> Validity {
    let d = model.delta_ph();
    if g >= d {
        Validity::Violated
    } else if g > VALIDITY_WARN * d {
        Validity::Warn
    } else {
        Validity::Ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    Absorption,
    Emission,
    PolaronAbsorption,
    OracleAbsorption,
}

impl SpectrumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumKind::Absorption => "absorption",
            SpectrumKind::Emission => "emission",
            SpectrumKind::PolaronAbsorption => "polaron_absorption",
            SpectrumKind::OracleAbsorption => "oracle_absorption",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumWarning {
    Validity { g: f64, delta_ph: f64 },
    /// Largest fitted-tail fraction among the transforms used.
    TransformTail { max_fraction: f64 },
    /// Most negative raw value (relative to the maximum) clipped to zero.
    NegativeClipped { relative: f64 },
    /// The whole spectrum vanished on the grid.
    Empty,
}

/// Uniform run `start + k·step`, `k < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Segment {
    pub fn span(lo: f64, hi: f64, count: usize) -> Self {
        let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
        Segment { start: lo, step, count }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }
}

/// Frequency grid made of uniform segments; the spectrum is reported on the
/// sorted union of their points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrequencyGrid {
    pub segments: Vec<Segment>,
}

impl FrequencyGrid {
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Self {
        FrequencyGrid { segments: alloc::vec![Segment::span(lo, hi, count)] }
    }

    pub fn points(points: &[f64]) -> Self {
        FrequencyGrid { segments: points.iter().map(|&p| Segment { start: p, step: 0.0, count: 1 }).collect() }
    }

    pub fn with_segment(mut self, seg: Segment) -> Self {
        self.segments.push(seg);
        self
    }

    /// `4001` points over `±1.5 max(Δ, 3ω_b)` plus `2001` over `±3g̃`
    /// (`±3g` when `⟨B⟩ = 0`).
    pub fn default_for(model: &PhononModel, delta: f64, g_tilde: f64, g: f64) -> Self {
        let half = 1.5 * delta.max(3.0 * model.omega_b());
        let mut grid = FrequencyGrid::uniform(-half, half, 4001);
        let inset = if g_tilde > 0.0 { 3.0 * g_tilde } else { 3.0 * g };
        if inset > 0.0 {
            grid.segments.push(Segment::span(-inset, inset, 2001));
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub omega: Vec<f64>,
    /// Normalized to unit maximum.
    pub intensity: Vec<f64>,
    /// Raw maximum; `intensity * scale` is the unnormalized value.
    pub scale: f64,
    pub fingerprint: u64,
    pub warnings: Vec<SpectrumWarning>,
}

impl Spectrum {
    pub fn raw(&self) -> impl Iterator<Item = f64> + '_ {
        self.intensity.iter().map(move |v| v * self.scale)
    }

    /// Trapezoid integral of the raw values over the reported points.
    pub fn integral(&self) -> f64 {
        let raw: Vec<f64> = self.raw().collect();
        self.omega.windows(2).zip(raw.windows(2)).map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1])).sum()
    }

    /// Local maxima `(ω, value)` above `floor` (relative to the maximum).
    pub fn peaks(&self, floor: f64) -> Vec<(f64, f64)> {
        let v = &self.intensity;
        (1..v.len().saturating_sub(1))
            .filter(|&i| v[i] > floor && v[i] >= v[i - 1] && v[i] > v[i + 1])
            .map(|i| (self.omega[i], v[i]))
            .collect()
    }

    /// Assembles a spectrum from raw samples, sorting and normalizing.
    pub fn from_raw(kind: SpectrumKind, mut samples: Vec<(f64, f64)>, fingerprint: u64, mut warnings: Vec<SpectrumWarning>) -> Self {
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| a.0 == b.0);
        let max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        let min = samples.iter().map(|s| s.1).fold(0.0, f64::min);
        if min < 0.0 && max > 0.0 && -min > 1e-6 * max {
            warnings.push(SpectrumWarning::NegativeClipped { relative: min / max });
        }
        if max <= 0.0 {
            warnings.push(SpectrumWarning::Empty);
        }
        let scale = if max > 0.0 { max } else { 1.0 };
        Spectrum {
            kind,
            omega: samples.iter().map(|s| s.0).collect(),
            intensity: samples.iter().map(|s| s.1.max(0.0) / scale).collect(),
            scale: if max > 0.0 { max } else { 0.0 },
            fingerprint,
            warnings,
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn fingerprint(kind: SpectrumKind, model: &PhononModel, params: &SystemParams, grid: &FrequencyGrid) -> u64 {
    let text: String = format!("{}|{:?}|{:?}|{:?}", kind.as_str(), model, params, grid);
    fnv1a(text.as_bytes())
}

/// Fermi-like weight `1/(1 + e^x)` with `x = sign·2g̃/T`, taking the `T → 0`
/// limit explicitly.
fn fermi(sign: f64, g_tilde: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return if g_tilde == 0.0 { 0.5 } else if sign > 0.0 { 0.0 } else { 1.0 };
    }
    let x = sign * 2.0 * g_tilde / temperature;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Spectra of one model and parameter set at the parameter temperature.
#[derive(Debug, Clone)]
pub struct SpectrumEngine {
    sd: SpectralDensity,
    params: SystemParams,
    tr: HalfTransform,
}

impl SpectrumEngine {
    pub fn new(model: PhononModel, params: SystemParams) -> Result<Self> {
        params.validate()?;
        let sd = SpectralDensity::new(model)?;
        let tr = HalfTransform::new(&sd, params.temperature)?;
        Ok(SpectrumEngine { sd, params, tr })
    }

    pub fn from_parts(sd: SpectralDensity, params: SystemParams, tr: HalfTransform) -> Result<Self> {
        params.validate()?;
        if tr.temperature() != params.temperature {
            return Err(Error::UnsupportedParams("transform built at a different temperature".into()));
        }
        Ok(SpectrumEngine { sd, params, tr })
    }

    pub fn spectral_density(&self) -> &SpectralDensity {
        &self.sd
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn transforms(&self) -> &HalfTransform {
        &self.tr
    }

    pub fn mean_b(&self) -> f64 {
        self.tr.mean_b()
    }

    pub fn g_tilde(&self) -> f64 {
        self.params.g * self.tr.mean_b()
    }

    pub fn default_grid(&self) -> FrequencyGrid {
        FrequencyGrid::default_for(self.sd.model(), self.sd.delta(), self.g_tilde(), self.params.g)
    }

    fn base_warnings(&self, g: f64) -> Vec<SpectrumWarning> {
        let mut w = Vec::new();
        if g > 0.0 && validity(self.sd.model(), g) != Validity::Ok {
            w.push(SpectrumWarning::Validity { g, delta_ph: self.sd.model().delta_ph() });
        }
        w
    }

    /// `(Ĝ_g, Ĝ_u)` at `start + k·step + iγ/2` for the points of `seg`.
    fn pairs(&self, seg: &Segment, shift: f64, sign: f64, gamma: f64) -> Vec<(TransformValue, TransformValue)> {
        let start = sign * (seg.start + shift);
        let step = sign * seg.step;
        if seg.count == 1 {
            return alloc::vec![self.tr.transform_pair(Complex64::new(start, 0.5 * gamma))];
        }
        self.tr.transform_grid(start, step, seg.count, gamma)
    }

    /// Absorption at coupling `g`; `γ = 0` is replaced by the regularization
    /// width.
    fn absorption_with(&self, g: f64, gamma: f64, grid: &FrequencyGrid, kind: SpectrumKind) -> Spectrum {
        let b = self.tr.mean_b();
        let gt = g * b;
        let mut warnings = self.base_warnings(g);
        let mut tail: f64 = 0.0;
        let mut samples = Vec::with_capacity(grid.len());
        for seg in &grid.segments {
            // Δω_+ = ω - g̃ and Δω_- = ω + g̃
            let at_plus = self.pairs(seg, -gt, 1.0, gamma);
            let at_minus = self.pairs(seg, gt, 1.0, gamma);
            for k in 0..seg.count {
                let w = seg.point(k);
                let (gp, up) = at_plus[k];
                let (gm, um) = at_minus[k];
                for v in [gp, up, gm, um] {
                    tail = tail.max(v.tail_fraction);
                }
                let branches = [(1.0, w - gt, gp.value + um.value), (-1.0, w + gt, gm.value + up.value)];
                let mut a = 0.0;
                for (eta, dw, ge) in branches {
                    a += absorption_term(w, eta, dw, ge, g, b, gamma);
                }
                samples.push((w, a));
            }
        }
        if tail > TAIL_WARN {
            warnings.push(SpectrumWarning::TransformTail { max_fraction: tail });
        }
        let fp = fingerprint(kind, self.sd.model(), &self.params, grid);
        Spectrum::from_raw(kind, samples, fp, warnings)
    }

    fn effective_gamma(&self) -> f64 {
        self.params.gamma().max(self.params.emission_regularization)
    }

    /// Absorption at an arbitrary coupling and width (the model and
    /// temperature stay fixed).
    pub fn absorption_at(&self, g: f64, gamma: f64, grid: &FrequencyGrid) -> Spectrum {
        let kind = if g == 0.0 { SpectrumKind::PolaronAbsorption } else { SpectrumKind::Absorption };
        self.absorption_with(g, gamma.max(self.params.emission_regularization), grid, kind)
    }

    pub fn absorption(&self, grid: &FrequencyGrid) -> Spectrum {
        self.absorption_with(self.params.g, self.effective_gamma(), grid, SpectrumKind::Absorption)
    }

    /// Absorption at `g = 0` with a Lorentzian ZPL of width `gamma`.
    pub fn polaron_spectrum(&self, gamma: f64, grid: &FrequencyGrid) -> Result<Spectrum> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::UnsupportedParams("the polaron spectrum needs a finite gamma > 0".into()));
        }
        Ok(self.absorption_with(0.0, gamma, grid, SpectrumKind::PolaronAbsorption))
    }

    /// Emission at `γ = 0`, regularized by `emission_regularization`.
    pub fn emission(&self, grid: &FrequencyGrid) -> Result<Spectrum> {
        if self.params.gamma() != 0.0 {
            return Err(Error::UnsupportedParams("emission is defined for gamma = 0 only".into()));
        }
        let g = self.params.g;
        let b = self.tr.mean_b();
        let gt = g * b;
        let t = self.params.temperature;
        let ge = self.params.emission_regularization;
        let mut warnings = self.base_warnings(g);
        let fp = fingerprint(SpectrumKind::Emission, self.sd.model(), &self.params, grid);
        let mut samples = Vec::with_capacity(grid.len());
        if self.sd.is_phonon_free() {
            // G ≡ 0: the ratio of vanishing dissipative parts is replaced by
            // its uniform-broadening limit, two lines at ±g weighted by the
            // thermal factors.
            let width = ge.max(grid_spacing(grid));
            for seg in &grid.segments {
                for k in 0..seg.count {
                    let w = seg.point(k);
                    let mut v = 0.0;
                    for eta in [1.0, -1.0] {
                        let d = w - eta * g;
                        v += fermi(eta, g, t) * width / (d * d + width * width);
                    }
                    samples.push((w, 2.0 * w * w * v));
                }
            }
            return Ok(Spectrum::from_raw(SpectrumKind::Emission, samples, fp, warnings));
        }
        let mut tail: f64 = 0.0;
        for seg in &grid.segments {
            let at_plus = self.pairs(seg, -gt, 1.0, ge);
            let at_minus = self.pairs(seg, gt, 1.0, ge);
            // -Δω_+ = -ω + g̃ and -Δω_- = -ω - g̃
            let neg_plus = self.pairs(seg, -gt, -1.0, ge);
            let neg_minus = self.pairs(seg, gt, -1.0, ge);
            for k in 0..seg.count {
                let w = seg.point(k);
                let (gp, up) = at_plus[k];
                let (gm, um) = at_minus[k];
                let (gnp, unp) = neg_plus[k];
                let (gnm, unm) = neg_minus[k];
                for v in [gp, up, gm, um, gnp, unp, gnm, unm] {
                    tail = tail.max(v.tail_fraction);
                }
                let branches = [
                    (1.0, w - gt, gp.value + um.value, gnp.value.re, unm.value.re),
                    (-1.0, w + gt, gm.value + up.value, gnm.value.re, unp.value.re),
                ];
                let mut v = 0.0;
                for (eta, dw, geta, gg_neg, gu_neg) in branches {
                    let num = gg_neg * fermi(eta, gt, t) + gu_neg * fermi(-eta, gt, t);
                    let re = dw - g * g * geta.im;
                    let im = g * g * geta.re;
                    v += num / (re * re + im * im);
                }
                samples.push((w, 2.0 * w * w * v));
            }
        }
        if tail > TAIL_WARN {
            warnings.push(SpectrumWarning::TransformTail { max_fraction: tail });
        }
        Ok(Spectrum::from_raw(SpectrumKind::Emission, samples, fp, warnings))
    }
}

/// One `η` term of the absorption; `ge = G″_η + iG′_η`.
pub fn absorption_term(w: f64, eta: f64, dw: f64, ge: Complex64, g: f64, b: f64, gamma: f64) -> f64 {
    let (gpp, gp) = (ge.re, ge.im);
    let hg = 0.5 * gamma;
    let r = eta * b + g * gp;
    let num = gpp * (w * w + hg * g * g * gpp + hg * hg) + hg * r * r;
    let re = dw - g * g * gp;
    let im = hg + g * g * gpp;
    num / (re * re + im * im)
}

fn grid_spacing(grid: &FrequencyGrid) -> f64 {
    grid.segments.iter().filter(|s| s.count > 1).map(|s| s.step.abs()).fold(0.0, f64::max)
}

pub fn absorption(model: PhononModel, params: SystemParams, grid: &FrequencyGrid) -> Result<Spectrum> {
    Ok(SpectrumEngine::new(model, params)?.absorption(grid))
}

pub fn emission(model: PhononModel, params: SystemParams, grid: &FrequencyGrid) -> Result<Spectrum> {
    SpectrumEngine::new(model, params)?.emission(grid)
}

pub fn polaron_spectrum(model: PhononModel, temperature: f64, grid: &FrequencyGrid, gamma: f64) -> Result<Spectrum> {
    let params = SystemParams { g: 0.0, temperature, ..Default::default() };
    SpectrumEngine::new(model, params)?.polaron_spectrum(gamma, grid)
}
