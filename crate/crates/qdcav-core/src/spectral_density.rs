//! Phonon spectral densities `J(ω)` and the bath scalars derived from them.
//!
//! Frequencies are measured in the same unit as `omega_b`; the coupling
//! strength is fixed through the polaron shift `Δ = ∫ J(ω)/ω dω`.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad;

/// How the ultraviolet end of a confined-mode density is treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UvCutoff {
    /// `J(ω) = 0` for `ω > omega_star`.
    Hard { omega_star: f64 },
    /// `J` keeps its power-law tail; `omega_star` only splits numerical
    /// quadrature from the analytic tail.
    PowerLaw { omega_star: f64 },
}

impl UvCutoff {
    pub fn omega_star(&self) -> f64 {
        match *self {
            UvCutoff::Hard { omega_star } | UvCutoff::PowerLaw { omega_star } => omega_star,
        }
    }
}

/// One undamped mode: contributes `λ² δ(ω - omega)` to `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaLine {
    pub omega: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhononModel {
    OhmicExp {
        delta: f64,
        omega_b: f64,
    },
    SuperohmicBulk {
        delta: f64,
        omega_b: f64,
        cutoff: UvCutoff,
    },
    ConfinedMode {
        n: u32,
        delta: f64,
        omega_b: f64,
        linewidth: f64,
        cutoff: UvCutoff,
    },
    DeltaMode {
        lines: Vec<DeltaLine>,
    },
}

impl PhononModel {
    pub fn ohmic(delta: f64, omega_b: f64) -> Self {
        PhononModel::OhmicExp { delta, omega_b }
    }

    pub fn bulk(delta: f64, omega_b: f64) -> Self {
        PhononModel::SuperohmicBulk {
            delta,
            omega_b,
            cutoff: UvCutoff::PowerLaw { omega_star: 20.0 * omega_b },
        }
    }

    /// Keeps the power-law tail for `n <= 3`; above that `∫ J/ω` needs the
    /// hard cutoff.
    pub fn confined(n: u32, delta: f64, omega_b: f64, linewidth: f64) -> Self {
        let omega_star = 20.0 * omega_b;
        let cutoff = if n <= 3 { UvCutoff::PowerLaw { omega_star } } else { UvCutoff::Hard { omega_star } };
        PhononModel::ConfinedMode { n, delta, omega_b, linewidth, cutoff }
    }

    /// A single undamped mode at `omega_b` with polaron shift `delta`.
    pub fn delta_mode(delta: f64, omega_b: f64) -> Self {
        PhononModel::DeltaMode {
            lines: alloc::vec![DeltaLine { omega: omega_b, coupling: (delta * omega_b).sqrt() }],
        }
    }

    pub fn phonon_free() -> Self {
        PhononModel::DeltaMode { lines: Vec::new() }
    }

    pub fn with_cutoff(self, cutoff: UvCutoff) -> Self {
        match self {
            PhononModel::SuperohmicBulk { delta, omega_b, .. } => {
                PhononModel::SuperohmicBulk { delta, omega_b, cutoff }
            }
            PhononModel::ConfinedMode { n, delta, omega_b, linewidth, .. } => {
                PhononModel::ConfinedMode { n, delta, omega_b, linewidth, cutoff }
            }
            other => other,
        }
    }

    pub fn omega_b(&self) -> f64 {
        match self {
            PhononModel::OhmicExp { omega_b, .. }
            | PhononModel::SuperohmicBulk { omega_b, .. }
            | PhononModel::ConfinedMode { omega_b, .. } => *omega_b,
            PhononModel::DeltaMode { lines } => lines.iter().map(|l| l.omega).fold(1.0, f64::max),
        }
    }

    /// Smallest characteristic frequency of `J`: the mode linewidth for
    /// confined modes, `omega_b` otherwise; infinite without phonons.
    pub fn delta_ph(&self) -> f64 {
        match self {
            PhononModel::ConfinedMode { linewidth, .. } => *linewidth,
            PhononModel::OhmicExp { omega_b, .. } | PhononModel::SuperohmicBulk { omega_b, .. } => *omega_b,
            PhononModel::DeltaMode { lines } => lines.iter().map(|l| l.omega).fold(f64::INFINITY, f64::min),
        }
    }

    /// Low-frequency exponent `n` of `J ∝ ω^n`.
    pub fn exponent(&self) -> Option<u32> {
        match self {
            PhononModel::OhmicExp { .. } => Some(1),
            PhononModel::SuperohmicBulk { .. } => Some(3),
            PhononModel::ConfinedMode { n, .. } => Some(*n),
            PhononModel::DeltaMode { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HuangRhys {
    Finite(f64),
    /// `∫ J/ω²` diverges at low frequency (ohmic coupling).
    Divergent,
}

impl HuangRhys {
    pub fn value(&self) -> Option<f64> {
        match *self {
            HuangRhys::Finite(s) => Some(s),
            HuangRhys::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathScalars {
    pub delta: f64,
    pub huang_rhys: HuangRhys,
    pub mean_b: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Ohmic { kappa: f64, omega_c: f64 },
    Confined {
        n: u32,
        omega_b: f64,
        quarter_w2: f64,
        norm: f64,
        split: f64,
        hard: bool,
        /// `J(ω) = Σ_k laurent[k] ω^{n-4-k}` above `split`.
        laurent: Vec<f64>,
    },
    Lines(Vec<DeltaLine>),
}

/// A validated spectral density with its normalization resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    model: PhononModel,
    delta: f64,
    pub(crate) shape: Shape,
}

/// `ω coth(ω / 2T)`, continuous through `ω = 0` and `T = 0`.
pub fn x_coth(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return omega.abs();
    }
    let x = omega / (2.0 * temperature);
    if x.abs() < 1e-4 {
        2.0 * temperature * (1.0 + x * x / 3.0)
    } else if x.abs() > 20.0 {
        omega.abs() * (1.0 + 2.0 * (-2.0 * x.abs()).exp())
    } else {
        omega / x.tanh()
    }
}

fn confined_denominator(omega: f64, omega_b: f64, quarter_w2: f64) -> f64 {
    let a = omega / omega_b + 1.0;
    let d = omega - omega_b;
    a * a * (d * d + quarter_w2)
}

fn laurent_series(omega_b: f64, quarter_w2: f64, norm: f64, split: f64) -> Vec<f64> {
    // 1/[(1+βu)²((1-βu)² + q u²)] expanded in u = 1/ω
    let b = omega_b;
    let p1 = [1.0, 2.0 * b, b * b];
    let p2 = [1.0, -2.0 * b, b * b + quarter_w2];
    let mut p = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            p[i + j] += p1[i] * p2[j];
        }
    }
    let mut r: Vec<f64> = Vec::new();
    for k in 0..64 {
        let mut s = if k == 0 { 1.0 } else { 0.0 };
        for j in 1..=k.min(4) {
            s -= p[j] * r[k - j];
        }
        r.push(s / p[0]);
        let u = 1.0 / split;
        if k > 4 && (r[k] * u.powi(k as i32)).abs() < 1e-18 && (r[k - 1] * u.powi(k as i32 - 1)).abs() < 1e-18 {
            break;
        }
    }
    r.into_iter().map(|rk| norm * b * b * rk).collect()
}

impl SpectralDensity {
    pub fn new(model: PhononModel) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidModel(m.into()));
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        match &model {
            PhononModel::OhmicExp { delta, omega_b } => {
                if !(delta.is_finite() && *delta >= 0.0) || !finite_pos(*omega_b) {
                    return bad("ohmic model needs delta >= 0 and omega_b > 0");
                }
                let shape = Shape::Ohmic { kappa: delta / omega_b, omega_c: *omega_b };
                Ok(SpectralDensity { delta: *delta, shape, model })
            }
            PhononModel::SuperohmicBulk { delta, omega_b, cutoff } => {
                let shape = Self::confined_shape(3, *delta, *omega_b, 2.0 * omega_b, *cutoff)?;
                Ok(SpectralDensity { delta: *delta, shape, model })
            }
            PhononModel::ConfinedMode { n, delta, omega_b, linewidth, cutoff } => {
                if *n != 1 && *n < 3 {
                    return Err(Error::InvalidModel(format!(
                        "confined-mode exponent n = {n} is not supported (use 1 or >= 3)"
                    )));
                }
                let shape = Self::confined_shape(*n, *delta, *omega_b, *linewidth, *cutoff)?;
                Ok(SpectralDensity { delta: *delta, shape, model })
            }
            PhononModel::DeltaMode { lines } => {
                if lines.iter().any(|l| !finite_pos(l.omega) || !l.coupling.is_finite()) {
                    return bad("delta-mode lines need omega > 0 and finite coupling");
                }
                let delta = lines.iter().map(|l| l.coupling * l.coupling / l.omega).sum();
                Ok(SpectralDensity { delta, shape: Shape::Lines(lines.clone()), model })
            }
        }
    }

    fn confined_shape(n: u32, delta: f64, omega_b: f64, linewidth: f64, cutoff: UvCutoff) -> Result<Shape> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidModel("delta must be finite and >= 0".into()));
        }
        if !(omega_b.is_finite() && omega_b > 0.0) {
            return Err(Error::InvalidModel("omega_b must be > 0".into()));
        }
        if !(linewidth.is_finite() && linewidth > 0.0) {
            return Err(Error::InvalidModel("confined-mode linewidth must be > 0".into()));
        }
        let split = cutoff.omega_star();
        if !(split.is_finite() && split > 2.0 * omega_b + 2.0 * linewidth) {
            return Err(Error::InvalidModel("omega_star must lie well above the mode".into()));
        }
        let quarter_w2 = 0.25 * linewidth * linewidth;
        let hard = matches!(cutoff, UvCutoff::Hard { .. });
        if !hard && n >= 4 {
            return Err(Error::InvalidModel(format!("a power-law tail makes the polaron shift diverge for n = {n}; use a hard cutoff")));
        }
        // ∫ ω^{n-1} / D(ω) dω
        let f = |w: f64| w.powi(n as i32 - 1) / confined_denominator(w, omega_b, quarter_w2);
        let pts = peak_breakpoints(omega_b, linewidth, split);
        let mut integral = quad::integrate(f, &pts, 1e-15, 1e-14)?;
        let unit = laurent_series(omega_b, quarter_w2, 1.0, split);
        if !hard {
            integral += tail_moment(&unit, n, 1, split);
        }
        let norm = if delta > 0.0 { delta / integral } else { 0.0 };
        let laurent = unit.iter().map(|r| r * norm).collect();
        Ok(Shape::Confined { n, omega_b, quarter_w2, norm, split, hard, laurent })
    }

    pub fn model(&self) -> &PhononModel {
        &self.model
    }

    /// Polaron shift `Δ = ∫ J/ω`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn polaron_shift(&self) -> f64 {
        self.delta
    }

    pub fn is_phonon_free(&self) -> bool {
        self.delta == 0.0
    }

    pub fn exponent(&self) -> Option<u32> {
        self.model.exponent()
    }

    /// Normalization constant of the continuous density, if any.
    pub fn normalization(&self) -> Option<f64> {
        match &self.shape {
            Shape::Ohmic { kappa, .. } => Some(*kappa),
            Shape::Confined { norm, .. } => Some(*norm),
            Shape::Lines(_) => None,
        }
    }

    /// `J(ω)`; zero for `ω <= 0` and for delta lines (use [`Self::lines`]).
    pub fn eval_j(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.j_over_pow(omega, 0)
    }

    /// `J(ω)/ω^p` evaluated without forming `J` first.
    pub(crate) fn j_over_pow(&self, omega: f64, p: i32) -> f64 {
        if omega < 0.0 || (omega == 0.0 && self.exponent().map_or(true, |n| (n as i32) < p)) {
            return 0.0;
        }
        match &self.shape {
            Shape::Ohmic { kappa, omega_c } => kappa * omega.powi(1 - p) * (-omega / omega_c).exp(),
            Shape::Confined { n, omega_b, quarter_w2, norm, split, hard, .. } => {
                if *hard && omega > *split {
                    return 0.0;
                }
                norm * omega.powi(*n as i32 - p) / confined_denominator(omega, *omega_b, *quarter_w2)
            }
            Shape::Lines(_) => 0.0,
        }
    }

    pub fn lines(&self) -> &[DeltaLine] {
        match &self.shape {
            Shape::Lines(l) => l,
            _ => &[],
        }
    }

    /// Upper end of the numerically integrated band.
    pub fn split(&self) -> f64 {
        match &self.shape {
            Shape::Ohmic { omega_c, .. } => 60.0 * omega_c,
            Shape::Confined { split, .. } => *split,
            Shape::Lines(l) => l.iter().map(|x| x.omega).fold(0.0, f64::max),
        }
    }

    pub(crate) fn has_power_tail(&self) -> bool {
        matches!(&self.shape, Shape::Confined { hard: false, .. })
    }

    pub(crate) fn laurent(&self) -> &[f64] {
        match &self.shape {
            Shape::Confined { laurent, hard: false, .. } => laurent,
            _ => &[],
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Confined { omega_b, quarter_w2, split, .. } => {
                peak_breakpoints(*omega_b, 2.0 * quarter_w2.sqrt(), *split)
            }
            _ => alloc::vec![0.0, self.split()],
        }
    }

    /// `∫ J(ω)/ω² coth(ω/2T) dω`.
    pub fn huang_rhys(&self, temperature: f64) -> Result<HuangRhys> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::UnsupportedParams("temperature must be finite and >= 0".into()));
        }
        match &self.shape {
            Shape::Lines(lines) => Ok(HuangRhys::Finite(
                lines
                    .iter()
                    .map(|l| l.coupling * l.coupling / (l.omega * l.omega * l.omega) * x_coth(l.omega, temperature))
                    .sum(),
            )),
            _ if self.delta == 0.0 => Ok(HuangRhys::Finite(0.0)),
            Shape::Ohmic { .. } => Ok(HuangRhys::Divergent),
            Shape::Confined { n: 1, .. } => Ok(HuangRhys::Divergent),
            Shape::Confined { n, split, hard, laurent, .. } => {
                let f = |w: f64| self.j_over_pow(w, 3) * x_coth(w, temperature);
                let mut s = quad::integrate(f, &self.breakpoints(), 1e-15, 1e-13)?;
                if !hard {
                    // coth ≈ 1 beyond the split for the supported temperature range
                    s += tail_moment(laurent, *n, 2, *split);
                }
                Ok(HuangRhys::Finite(s))
            }
        }
    }

    /// `⟨B⟩ = exp(-S/2)`, zero when `S` diverges.
    pub fn mean_b(&self, temperature: f64) -> Result<f64> {
        Ok(match self.huang_rhys(temperature)? {
            HuangRhys::Finite(s) => (-0.5 * s).exp(),
            HuangRhys::Divergent => 0.0,
        })
    }

    pub fn scalars(&self, temperature: f64) -> Result<BathScalars> {
        let huang_rhys = self.huang_rhys(temperature)?;
        let mean_b = match huang_rhys {
            HuangRhys::Finite(s) => (-0.5 * s).exp(),
            HuangRhys::Divergent => 0.0,
        };
        Ok(BathScalars { delta: self.delta, huang_rhys, mean_b, temperature })
    }
}

fn peak_breakpoints(omega_b: f64, linewidth: f64, split: f64) -> Vec<f64> {
    let mut pts = alloc::vec![0.0];
    for x in [omega_b - 10.0 * linewidth, omega_b - linewidth, omega_b, omega_b + linewidth, omega_b + 10.0 * linewidth] {
        if x > *pts.last().unwrap() && x < split {
            pts.push(x);
        }
    }
    pts.push(split);
    pts
}

/// `∫_W^∞ J(ω)/ω^m dω` from the Laurent coefficients.
pub(crate) fn tail_moment(laurent: &[f64], n: u32, m: i32, split: f64) -> f64 {
    laurent
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = 4 + k as i32 + m - n as i32;
            a * split.powi(1 - p) / (p as f64 - 1.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bulk_normalization_matches_shift() {
        let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
        let f = |w: f64| sd.eval_j(w) / w;
        // integrate on u ∈ (0,1] with ω = u/(1-u) to reach infinity directly
        let g = |u: f64| {
            let w = u / (1.0 - u);
            f(w) / ((1.0 - u) * (1.0 - u))
        };
        let total = quad::integrate(g, &[0.0, 0.25, 0.5, 0.75, 1.0 - 1e-9], 1e-14, 1e-12).unwrap();
        assert!((total - 2.0).abs() < 1e-8, "{total}");
        assert!((sd.normalization().unwrap() - 2.296_726_564_112_981).abs() < 1e-9);
    }

    #[test]
    fn laurent_tail_reproduces_density() {
        let sd = SpectralDensity::new(PhononModel::confined(3, 3.0, 1.0, 0.06)).unwrap();
        for &w in &[20.0, 35.0, 400.0] {
            let series: f64 = sd.laurent().iter().enumerate().map(|(k, a)| a * w.powi(3 - 4 - k as i32)).sum();
            assert!((series / sd.eval_j(w) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn hard_cutoff_values() {
        let sd = SpectralDensity::new(
            PhononModel::bulk(2.0, 1.0).with_cutoff(UvCutoff::Hard { omega_star: 20.0 }),
        )
        .unwrap();
        assert!((sd.normalization().unwrap() - 2.436_747_795_259_202).abs() < 1e-9);
        assert_eq!(sd.eval_j(20.5), 0.0);
        let s = sd.huang_rhys(0.1).unwrap().value().unwrap();
        assert!((s - 2.0 * 0.593_383_725_770_610_7).abs() < 1e-9, "{s}");
    }

    #[test]
    fn ohmic_is_divergent() {
        let sd = SpectralDensity::new(PhononModel::ohmic(0.5, 1.0)).unwrap();
        assert_eq!(sd.huang_rhys(0.0).unwrap(), HuangRhys::Divergent);
        assert_eq!(sd.mean_b(0.05).unwrap(), 0.0);
        let c = SpectralDensity::new(PhononModel::confined(1, 3.0, 1.0, 0.06)).unwrap();
        assert_eq!(c.mean_b(0.0).unwrap(), 0.0);
    }

    #[test]
    fn delta_mode_scalars() {
        let sd = SpectralDensity::new(PhononModel::delta_mode(1.0, 1.0)).unwrap();
        assert!((sd.huang_rhys(0.0).unwrap().value().unwrap() - 1.0).abs() < 1e-15);
        assert!((sd.delta() - 1.0).abs() < 1e-15);
        let warm = sd.huang_rhys(0.5).unwrap().value().unwrap();
        assert!((warm - 1.0 / (1.0f64).tanh()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(SpectralDensity::new(PhononModel::confined(3, 1.0, 1.0, 0.0)).is_err());
        assert!(SpectralDensity::new(PhononModel::confined(2, 1.0, 1.0, 0.1)).is_err());
        assert!(SpectralDensity::new(PhononModel::ohmic(-1.0, 1.0)).is_err());
    }
}
