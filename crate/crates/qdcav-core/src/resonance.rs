//! Polariton poles, the pole (Lorentzian) approximation and vacuum-Rabi
//! splitting classification.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{NumericalError, Result};
use crate::half_fourier::HalfTransform;
use crate::spectra::{FrequencyGrid, Segment, SpectrumEngine};

/// `max γ̃ < UNDERDAMPED · splitting` counts as underdamped.
pub const UNDERDAMPED: f64 = 0.5;
/// `max γ̃ > OVERDAMPED · splitting` counts as overdamped.
pub const OVERDAMPED: f64 = 2.0;
/// Relative L¹ distance to the `g = 0` spectrum below which the cavity
/// spectrum counts as converged onto the polaron spectrum.
pub const POLARON_CONVERGED: f64 = 0.05;
/// Residual accepted as a root of `Δω_η - g²G′_η`.
pub const ROOT_TOL: f64 = 1e-10;
/// Sign-change scan resolution on `[-g, g]`.
pub const SCAN_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VrsClass {
    Underdamped,
    Overdamped,
    Marginal,
}

/// `Δω_η - g² G′_η(ω)` and `G_η = G″_η + iG′_η` on one branch.
#[derive(Debug, Clone, Copy)]
struct Branch<'a> {
    tr: &'a HalfTransform,
    eta: f64,
    g: f64,
    g_tilde: f64,
    gamma: f64,
}

impl Branch<'_> {
    fn g_eta(&self, w: f64) -> Complex64 {
        let hg = 0.5 * self.gamma;
        let (own, other) = (w - self.eta * self.g_tilde, w + self.eta * self.g_tilde);
        let (gg, _) = self.tr.transform_pair(Complex64::new(own, hg));
        let (_, gu) = self.tr.transform_pair(Complex64::new(other, hg));
        gg.value + gu.value
    }

    fn residual(&self, w: f64) -> f64 {
        w - self.eta * self.g_tilde - self.g * self.g * self.g_eta(w).im
    }
}

/// Roots of `Δω_η - g²G′_η` in `[-g, g]` for `η = +1` and `η = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleRoots {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl PoleRoots {
    pub fn multiple(&self) -> bool {
        self.plus.len() > 1 || self.minus.len() > 1
    }
}

/// Brent's method on a bracketing interval.
fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, ftol: f64) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (lo, hi) = (a, b);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-16;
        let m = 0.5 * (c - b);
        if fb.abs() < ftol || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)), (qa - 1.0) * (r - 1.0) * (s - 1.0))
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    Err(NumericalError::RootNotConverged { lo, hi }.into())
}

/// Scans `[-g, g]` on [`SCAN_NODES`] intervals and refines every sign change
/// to `|residual| < 1e-10`.
pub fn find_poles(tr: &HalfTransform, g: f64, gamma: f64) -> Result<PoleRoots> {
    let g_tilde = g * tr.mean_b();
    let count = SCAN_NODES + 1;
    let step = 2.0 * g / SCAN_NODES as f64;
    let nodes: Vec<f64> = (0..count).map(|k| if k == SCAN_NODES { g } else { -g + k as f64 * step }).collect();
    // Ĝ at ω ∓ g̃ over the scan nodes, batched
    let at_minus_shift = tr.transform_grid(-g - g_tilde, step, count, gamma);
    let at_plus_shift = tr.transform_grid(-g + g_tilde, step, count, gamma);
    let mut out = PoleRoots { plus: Vec::new(), minus: Vec::new() };
    for eta in [1.0, -1.0] {
        let branch = Branch { tr, eta, g, g_tilde, gamma };
        let vals: Vec<f64> = (0..count)
            .map(|k| {
                let (own, other) = if eta > 0.0 { (&at_minus_shift, &at_plus_shift) } else { (&at_plus_shift, &at_minus_shift) };
                let ge = own[k].0.value + other[k].1.value;
                nodes[k] - eta * g_tilde - g * g * ge.im
            })
            .collect();
        let roots = if eta > 0.0 { &mut out.plus } else { &mut out.minus };
        for k in 0..count {
            if vals[k] == 0.0 {
                roots.push(nodes[k]);
                continue;
            }
            if k + 1 < count && vals[k + 1] != 0.0 && vals[k].signum() != vals[k + 1].signum() {
                let r = brent(|w| branch.residual(w), nodes[k], nodes[k + 1], vals[k], vals[k + 1], ROOT_TOL)?;
                // a sign change across a singularity of G′ is not a root
                if branch.residual(r).abs() <= ROOT_TOL {
                    roots.push(r);
                }
            }
        }
    }
    Ok(out)
}

/// A resolved polariton line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub omega: f64,
    /// `γ̃ = γ + 2g²G″_η(ω̃)`.
    pub width: f64,
    /// Integrated weight relative to the uncoupled line, `f_η / 2π`.
    pub strength: f64,
    /// Numerator of the `η` term at the pole.
    numerator: f64,
}

impl Pole {
    /// Lorentzian reconstruction of this line in raw absorption units.
    pub fn lorentzian(&self, w: f64) -> f64 {
        let hw = 0.5 * self.width;
        let d = w - self.omega;
        if hw > 0.0 {
            self.numerator / (d * d + hw * hw)
        } else {
            0.0
        }
    }
}

/// Evidence from the spectrum itself, used where pole uniqueness is not
/// guaranteed (`n = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEvidence {
    /// Width used to broaden both spectra.
    pub gamma_probe: f64,
    /// `∫|A_g - A_0| / ∫A_0` over the default grid.
    pub l1_to_polaron: f64,
    /// Peaks within `±3g` above 10% of the window maximum.
    pub peaks: Vec<f64>,
    /// A peak on each side of zero with a dip between them.
    pub doublet: bool,
    pub class: VrsClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub g: f64,
    pub gamma: f64,
    pub mean_b: f64,
    pub plus: Option<Pole>,
    pub minus: Option<Pole>,
    pub roots: PoleRoots,
    /// `ω̃₊ - ω̃₋` when both poles exist.
    pub splitting: Option<f64>,
    /// `2g⟨B⟩`.
    pub splitting_estimate: f64,
    pub compound_strength: Option<f64>,
    /// `⟨B⟩²`.
    pub compound_strength_estimate: f64,
    /// Whether pole uniqueness is guaranteed for this model (`n >= 3`,
    /// delta modes, no phonons).
    pub guaranteed: bool,
    pub evidence: Option<SpectralEvidence>,
    pub thresholds: (f64, f64),
    pub vrs: VrsClass,
}

impl ResonanceReport {
    pub fn omega_tilde_plus(&self) -> Option<f64> {
        self.plus.map(|p| p.omega)
    }

    pub fn omega_tilde_minus(&self) -> Option<f64> {
        self.minus.map(|p| p.omega)
    }

    pub fn gamma_tilde_plus(&self) -> Option<f64> {
        self.plus.map(|p| p.width)
    }

    pub fn gamma_tilde_minus(&self) -> Option<f64> {
        self.minus.map(|p| p.width)
    }

    /// Two-Lorentzian reconstruction of the absorption in raw units.
    pub fn pole_spectrum(&self, w: f64) -> f64 {
        self.plus.map_or(0.0, |p| p.lorentzian(w)) + self.minus.map_or(0.0, |p| p.lorentzian(w))
    }
}

fn pick(roots: &[f64], target: f64) -> Option<f64> {
    roots.iter().copied().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
}

fn pole_at(tr: &HalfTransform, eta: f64, w: f64, g: f64, gamma: f64) -> Pole {
    let b = tr.mean_b();
    let branch = Branch { tr, eta, g, g_tilde: g * b, gamma };
    let ge = branch.g_eta(w);
    let (gpp, gp) = (ge.re, ge.im);
    let hg = 0.5 * gamma;
    let width = gamma + 2.0 * g * g * gpp;
    let r = eta * b + g * gp;
    let numerator = gpp * (w * w + hg * g * g * gpp + hg * hg) + hg * r * r;
    let weight = if gamma == 0.0 {
        // π G″ω²/(g²G″), kept finite as G″ → 0
        core::f64::consts::PI * w * w / (g * g)
    } else {
        core::f64::consts::PI * numerator / (0.5 * width)
    };
    Pole { omega: w, width, strength: weight / (2.0 * core::f64::consts::PI), numerator }
}

/// Classification by widths against the splitting.
pub fn classify_vrs(report: &ResonanceReport) -> VrsClass {
    match (report.plus, report.minus) {
        (Some(p), Some(m)) if p.omega > m.omega => {
            let split = p.omega - m.omega;
            let w = p.width.max(m.width);
            if w < UNDERDAMPED * split {
                VrsClass::Underdamped
            } else if w > OVERDAMPED * split {
                VrsClass::Overdamped
            } else {
                VrsClass::Marginal
            }
        }
        _ => VrsClass::Overdamped,
    }
}

/// Pole report at the engine's coupling and loss rate.
pub fn pole_approximation(engine: &SpectrumEngine) -> Result<ResonanceReport> {
    let params = engine.params();
    let (g, gamma) = (params.g, params.gamma());
    let tr = engine.transforms();
    let b = tr.mean_b();
    let roots = find_poles(tr, g, gamma)?;
    let (wp, wm) = if b > 0.0 {
        (pick(&roots.plus, g * b), pick(&roots.minus, -g * b))
    } else {
        // both branches coincide without a coherent coupling: take the
        // outermost pair
        let hi = roots.plus.iter().copied().reduce(f64::max);
        let lo = roots.minus.iter().copied().reduce(f64::min);
        match (hi, lo) {
            (Some(h), Some(l)) if h > l => (Some(h), Some(l)),
            _ => (hi, None),
        }
    };
    let plus = wp.map(|w| pole_at(tr, 1.0, w, g, gamma));
    let minus = wm.map(|w| pole_at(tr, -1.0, w, g, gamma));
    let splitting = match (plus, minus) {
        (Some(p), Some(m)) => Some(p.omega - m.omega),
        _ => None,
    };
    let compound_strength = match (plus, minus) {
        (Some(p), Some(m)) => Some(p.strength + m.strength),
        _ => None,
    };
    let sd = engine.spectral_density();
    let guaranteed = sd.exponent().map_or(true, |n| n >= 3);
    let mut report = ResonanceReport {
        g,
        gamma,
        mean_b: b,
        plus,
        minus,
        roots,
        splitting,
        splitting_estimate: 2.0 * g * b,
        compound_strength,
        compound_strength_estimate: b * b,
        guaranteed,
        evidence: None,
        thresholds: (UNDERDAMPED, OVERDAMPED),
        vrs: VrsClass::Marginal,
    };
    report.vrs = classify_vrs(&report);
    if !guaranteed {
        let ev = spectral_evidence(engine)?;
        report.vrs = ev.class;
        report.evidence = Some(ev);
    }
    Ok(report)
}

/// Compares the cavity spectrum with the polaron spectrum, both broadened
/// by `γ_probe = max(γ, 4 × inset spacing)`.
pub fn spectral_evidence(engine: &SpectrumEngine) -> Result<SpectralEvidence> {
    let params = engine.params();
    let g = params.g;
    let grid = engine.default_grid();
    let inset = Segment::span(-3.0 * g, 3.0 * g, 2001);
    let gamma_probe = params.gamma().max(4.0 * inset.step);
    let with = engine.absorption_at(g, gamma_probe, &grid);
    let without = engine.absorption_at(0.0, gamma_probe, &grid);
    let a: Vec<f64> = with.raw().collect();
    let p: Vec<f64> = without.raw().collect();
    let mut diff = 0.0;
    let mut norm = 0.0;
    for i in 0..with.omega.len() - 1 {
        let h = with.omega[i + 1] - with.omega[i];
        diff += 0.5 * h * ((a[i] - p[i]).abs() + (a[i + 1] - p[i + 1]).abs());
        norm += 0.5 * h * (p[i] + p[i + 1]);
    }
    let l1 = if norm > 0.0 { diff / norm } else { f64::INFINITY };

    let window = engine.absorption_at(g, gamma_probe, &FrequencyGrid { segments: alloc::vec![inset] });
    let peaks: Vec<f64> = window.peaks(0.1).into_iter().map(|p| p.0).collect();
    let doublet = has_doublet(&window.omega, &window.intensity);
    let class = if doublet {
        VrsClass::Underdamped
    } else if l1 < POLARON_CONVERGED {
        VrsClass::Overdamped
    } else {
        VrsClass::Marginal
    };
    Ok(SpectralEvidence { gamma_probe, l1_to_polaron: l1, peaks, doublet, class })
}

/// A local maximum on each side of zero (dominating three neighbours each
/// way and above `1e-3` of the maximum) with a minimum between them below
/// 80% of the smaller one.
pub fn has_doublet(omega: &[f64], v: &[f64]) -> bool {
    let max = v.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return false;
    }
    let n = v.len();
    let is_peak = |i: usize| {
        let lo = i.saturating_sub(3);
        let hi = (i + 3).min(n - 1);
        i > 0 && i + 1 < n && v[i] > 1e-3 * max && v[i] > v[i + 1] && (lo..=hi).all(|j| v[j] <= v[i])
    };
    let best = |range: core::ops::Range<usize>| -> Option<(usize, f64)> {
        range.filter(|&i| is_peak(i)).map(|i| (i, v[i])).max_by(|a, b| a.1.total_cmp(&b.1))
    };
    let zero = omega.partition_point(|&w| w < 0.0);
    match (best(0..zero), best(zero..n)) {
        (Some((i, a)), Some((j, b))) => {
            let dip = v[i..=j].iter().copied().fold(f64::INFINITY, f64::min);
            dip < 0.8 * a.min(b)
        }
        _ => false,
    }
}
