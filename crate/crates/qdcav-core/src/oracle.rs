//! Brute-force cross-checks of the frequency-domain spectra.
//!
//! * Exact diagonalization of the dot-cavity-phonon Hamiltonian with a few
//!   discrete modes on truncated Fock spaces.
//! * Time-domain integration of the polaron-frame master equation with the
//!   probe treated order by order, reading the absorption off the stationary
//!   depletion rate of the ground-state population.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix2, Matrix3, SymmetricEigen, Vector2};
use num_complex::Complex64;
use num_traits::Float;

use crate::bath_correlation::{BathCorrelation, Which};
use crate::error::{Error, NumericalError, Result};
use crate::half_fourier::HalfTransform;
use crate::quad::{hermite_panel_linear, moments};
use crate::spectra::{fnv1a, FrequencyGrid, Spectrum, SpectrumEngine, SpectrumKind, SystemParams};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Largest total Hilbert space handled by [`exact_lines`].
pub const MAX_DIMENSION: usize = 8192;
pub const MAX_MODES: usize = 4;
pub const MAX_FOCK: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteMode {
    pub omega: f64,
    /// Coupling `λ_k` of `σ_ee λ_k (b_k + b_k†)`.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBath {
    pub modes: Vec<DiscreteMode>,
    pub fock_cutoff: usize,
}

impl DiscreteBath {
    /// One mode at `omega` with Huang-Rhys factor `s = (λ/ω)²`.
    pub fn single(omega: f64, s: f64, fock_cutoff: usize) -> Self {
        DiscreteBath { modes: vec![DiscreteMode { omega, lambda: s.sqrt() * omega }], fock_cutoff }
    }

    pub fn polaron_shift(&self) -> f64 {
        self.modes.iter().map(|m| m.lambda * m.lambda / m.omega).sum()
    }

    pub fn huang_rhys(&self) -> f64 {
        self.modes.iter().map(|m| (m.lambda / m.omega).powi(2)).sum()
    }

    pub fn phonon_dimension(&self) -> usize {
        (self.fock_cutoff + 1).pow(self.modes.len() as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.iter().any(|m| !(m.omega > 0.0 && m.omega.is_finite() && m.lambda.is_finite())) {
            return Err(Error::InvalidModel("discrete modes need finite omega > 0 and finite lambda".into()));
        }
        if self.modes.len() > MAX_MODES || self.fock_cutoff > MAX_FOCK {
            return Err(Error::DimensionOverflow { dim: 2 * self.phonon_dimension(), limit: MAX_DIMENSION });
        }
        let dim = 2 * self.phonon_dimension();
        if dim > MAX_DIMENSION {
            return Err(Error::DimensionOverflow { dim, limit: MAX_DIMENSION });
        }
        Ok(())
    }

    fn occupations(&self, index: usize) -> Vec<usize> {
        let base = self.fock_cutoff + 1;
        let mut rest = index;
        self.modes
            .iter()
            .map(|_| {
                let n = rest % base;
                rest /= base;
                n
            })
            .collect()
    }
}

/// One absorption line `ω = E_f - E_i` with thermal weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactLine {
    pub omega: f64,
    pub weight: f64,
}

/// Weak-probe absorption lines of the one-excitation manifold from the
/// thermal phonon state on `|g, 0⟩`, with the cavity resonant with the ZPL.
pub fn exact_lines(bath: &DiscreteBath, g: f64, temperature: f64) -> Result<Vec<ExactLine>> {
    bath.validate()?;
    let dph = bath.phonon_dimension();
    let base = bath.fock_cutoff + 1;
    let shift = bath.polaron_shift();
    let energy = |occ: &[usize]| -> f64 { occ.iter().zip(&bath.modes).map(|(&n, m)| n as f64 * m.omega).sum() };
    // |1⟩ ⊗ ph on rows 0..dph, |2⟩ ⊗ ph on rows dph..2dph
    let mut h = DMatrix::<f64>::zeros(2 * dph, 2 * dph);
    let mut stride = 1;
    let mut strides = Vec::new();
    for _ in &bath.modes {
        strides.push(stride);
        stride *= base;
    }
    for idx in 0..dph {
        let occ = bath.occupations(idx);
        let e = energy(&occ);
        h[(idx, idx)] = e;
        h[(dph + idx, dph + idx)] = e + shift;
        h[(idx, dph + idx)] = g;
        h[(dph + idx, idx)] = g;
        for (k, m) in bath.modes.iter().enumerate() {
            if occ[k] < bath.fock_cutoff {
                let j = idx + strides[k];
                let v = m.lambda * ((occ[k] + 1) as f64).sqrt();
                h[(dph + idx, dph + j)] = v;
                h[(dph + j, dph + idx)] = v;
            }
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut weights = Vec::with_capacity(dph);
    for idx in 0..dph {
        let e = energy(&bath.occupations(idx));
        let p = if temperature > 0.0 { (-e / temperature).exp() } else if idx == 0 { 1.0 } else { 0.0 };
        weights.push((e, p));
    }
    let z: f64 = weights.iter().map(|w| w.1).sum();
    let mut lines = Vec::new();
    for (idx, &(e, p)) in weights.iter().enumerate() {
        let p = p / z;
        if p < 1e-14 {
            continue;
        }
        for f in 0..2 * dph {
            let amp = eig.eigenvectors[(dph + idx, f)];
            let w = p * amp * amp;
            if w > 1e-16 {
                lines.push(ExactLine { omega: eig.eigenvalues[f] - e, weight: w });
            }
        }
    }
    lines.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok(lines)
}

/// Largest change of the positions and weights of lines heavier than
/// `min_weight` when the Fock cutoff grows by two.
pub fn truncation_change(bath: &DiscreteBath, g: f64, temperature: f64, min_weight: f64) -> Result<f64> {
    let coarse = exact_lines(bath, g, temperature)?;
    let fine = exact_lines(&DiscreteBath { fock_cutoff: bath.fock_cutoff + 2, ..bath.clone() }, g, temperature)?;
    let mut worst: f64 = 0.0;
    for line in coarse.iter().filter(|l| l.weight > min_weight) {
        let near = fine
            .iter()
            .min_by(|a, b| (a.omega - line.omega).abs().total_cmp(&(b.omega - line.omega).abs()))
            .ok_or(Error::DegenerateInput("no lines".into()))?;
        worst = worst.max((near.omega - line.omega).abs()).max((near.weight - line.weight).abs());
    }
    Ok(worst)
}

/// Exact lines broadened into Lorentzians of half width `γ/2`
/// (`emission_regularization` when `γ = 0`), with total area `2π` like the
/// analytic spectra.
pub fn exact_absorption(bath: &DiscreteBath, params: &SystemParams, grid: &FrequencyGrid) -> Result<Spectrum> {
    params.validate()?;
    let lines = exact_lines(bath, params.g, params.temperature)?;
    let hw = 0.5 * params.gamma().max(params.emission_regularization);
    let mut samples = Vec::with_capacity(grid.len());
    for seg in &grid.segments {
        for k in 0..seg.count {
            let w = seg.point(k);
            let v: f64 = lines
                .iter()
                .map(|l| {
                    let d = w - l.omega;
                    2.0 * l.weight * hw / (d * d + hw * hw)
                })
                .sum();
            samples.push((w, v));
        }
    }
    let text = alloc::format!("exact|{:?}|{:?}|{:?}", bath, params, grid);
    Ok(Spectrum::from_raw(SpectrumKind::OracleAbsorption, samples, fnv1a(text.as_bytes()), Vec::new()))
}

// ---------------------------------------------------------------------------
// time domain

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryVariant {
    /// The memory integral acts on the state history.
    TimeNonlocal,
    /// The history is replaced by the current state propagated back with the
    /// coherent part of the probe-free system Hamiltonian.
    TimeLocal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeDomainOptions {
    /// Step of the piecewise linear state history.
    pub step: f64,
    pub t_end: f64,
    /// Memory is cut where `|G(τ)| e^{-γτ/2}` stays below this fraction of
    /// its initial value.
    pub memory_floor: f64,
    pub variant: MemoryVariant,
    /// The rate is also read at `check_fraction · t_end`.
    pub check_fraction: f64,
    /// Allowed relative drift between the two readings.
    pub tolerance: f64,
}

impl Default for TimeDomainOptions {
    fn default() -> Self {
        TimeDomainOptions {
            step: 1.0,
            t_end: 1e5,
            memory_floor: 1e-8,
            variant: MemoryVariant::TimeNonlocal,
            check_fraction: 0.8,
            tolerance: 2e-3,
        }
    }
}

/// Stationary depletion rate of `ρ⁽²⁾₀₀` at one probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReading {
    pub omega: f64,
    /// `-dρ⁽²⁾₀₀/dt` at `t_end`.
    pub rate: f64,
    /// The same at `check_fraction · t_end`.
    pub rate_check: f64,
    pub memory_steps: usize,
}

impl RateReading {
    pub fn drift(&self) -> f64 {
        (self.rate - self.rate_check).abs() / self.rate.abs().max(1e-300)
    }
}

/// Kernel `G_m(τ)` as seen by the integrators.
enum Kernel<'a> {
    None,
    Sampled(&'a BathCorrelation),
    Lines(&'a [(f64, f64)], &'a [(f64, f64)]),
}

impl<'a> Kernel<'a> {
    fn of(tr: &'a HalfTransform) -> Self {
        if let Some(b) = tr.bath() {
            return Kernel::Sampled(b);
        }
        match (tr.lines(Which::Gg), tr.lines(Which::Gu)) {
            (Some(g), Some(u)) if !(g.is_empty() && u.is_empty()) => Kernel::Lines(g, u),
            _ => Kernel::None,
        }
    }

    fn value(&self, which: Which, t: f64) -> C {
        match self {
            Kernel::None => ZERO,
            Kernel::Sampled(b) => {
                if t > b.end_time() {
                    ZERO
                } else {
                    b.interpolate(which, t).0
                }
            }
            Kernel::Lines(g, u) => {
                let lines = if which == Which::Gg { g } else { u };
                lines.iter().map(|&(nu, w)| w * (-I * nu * t).exp()).sum()
            }
        }
    }

    /// Time past which `|G| e^{-γτ/2}` stays below `floor · |G(0)|`.
    fn memory_time(&self, gamma: f64, floor: f64, t_end: f64) -> Result<f64> {
        match self {
            Kernel::None => Ok(0.0),
            Kernel::Sampled(b) => {
                let size = |g: C, u: C| g.norm().max(u.norm());
                let mut samples = b.samples();
                let first = samples.next().map(|s| size(s.2, s.3)).unwrap_or(0.0);
                let mut last = 0.0;
                for (t, _, g, u) in b.samples() {
                    if size(g, u) * (-0.5 * gamma * t).exp() >= floor * first {
                        last = t;
                    }
                }
                // the graded grid is coarse: extend to the next node
                let next = b.times().iter().copied().find(|&t| t > last).unwrap_or(last);
                Ok(next.min(t_end))
            }
            Kernel::Lines(..) => {
                if gamma > 0.0 {
                    Ok((2.0 * (1.0 / floor).ln() / gamma).min(t_end))
                } else {
                    Err(Error::UnsupportedParams("delta-mode kernels need gamma > 0 in the time domain".into()))
                }
            }
        }
    }

    /// Hat-function weights of `G(τ) e^{izτ}` on the grid `τ_k = k h`:
    /// `right[k] = ∫_{kh}^{(k+1)h} K ((k+1)h - τ)/h` and
    /// `left[k] = ∫_{(k-1)h}^{kh} K (τ - (k-1)h)/h`.
    fn hat_weights(&self, which: Which, z: C, h: f64, panels: usize) -> (Vec<C>, Vec<C>) {
        let mut left = vec![ZERO; panels + 1];
        let mut right = vec![ZERO; panels + 1];
        match self {
            Kernel::None => {}
            Kernel::Lines(g, u) => {
                let lines = if which == Which::Gg { g } else { u };
                let mut m = [ZERO; 2];
                for &(nu, w) in lines.iter() {
                    let zeta = z - nu;
                    moments(zeta * h, &mut m);
                    let step = (I * zeta * h).exp();
                    let mut phase = ONE;
                    for p in 0..panels {
                        if p % 256 == 0 {
                            phase = (I * zeta * (p as f64 * h)).exp();
                        }
                        let base = w * h * phase;
                        right[p] += base * (m[0] - m[1]);
                        left[p + 1] += base * m[1];
                        phase *= step;
                    }
                }
            }
            Kernel::Sampled(b) => {
                let t = b.times();
                let t_end = b.end_time();
                let mut i = 0usize;
                for p in 0..panels {
                    let lo = p as f64 * h;
                    let hi = lo + h;
                    if lo >= t_end {
                        break;
                    }
                    while i < t.len() && t[i] <= lo {
                        i += 1;
                    }
                    let mut a = lo;
                    let (mut fa, mut da) = b.interpolate(which, a);
                    loop {
                        let (bnd, (fb, db)) = if i < t.len() && t[i] < hi {
                            (t[i], b.node(which, i))
                        } else {
                            let e = hi.min(t_end);
                            (e, b.interpolate(which, e))
                        };
                        let len = bnd - a;
                        if len > 0.0 {
                            right[p] += hermite_panel_linear(z, a, len, fa, da, fb, db, C::from((hi - a) / h), C::from(-len / h));
                            left[p + 1] += hermite_panel_linear(z, a, len, fa, da, fb, db, C::from((a - lo) / h), C::from(len / h));
                        }
                        if !(i < t.len() && t[i] < hi) {
                            break;
                        }
                        a = bnd;
                        fa = fb;
                        da = db;
                        i += 1;
                    }
                }
            }
        }
        (left, right)
    }
}

/// The 2×2 operators of the order-one problem in the `{|1⟩, |2⟩}` block.
struct Algebra {
    a: Matrix2<C>,
    x: [Matrix2<C>; 2],
    y: [Vector2<C>; 2],
    kappa: [C; 2],
    proj: [Matrix2<C>; 2],
    b: f64,
}

impl Algebra {
    fn new(g: f64, b: f64, gamma: f64, omega: f64) -> Self {
        let gt = g * b;
        let h12 = Matrix2::new(C::new(0.0, -0.5 * gamma), C::from(gt), C::from(gt), C::new(0.0, -0.5 * gamma));
        let a = (h12 - Matrix2::identity() * C::from(omega)) * (-I);
        let x_g = Matrix2::new(ZERO, C::from(g), C::from(g), ZERO);
        let x_u = Matrix2::new(ZERO, I * g, -I * g, ZERO);
        let half = C::from(0.5);
        let p_plus = Matrix2::new(half, half, half, half);
        let p_minus = Matrix2::new(half, -half, -half, half);
        Algebra {
            a,
            x: [x_g, x_u],
            y: [Vector2::new(ZERO, ONE), Vector2::new(ZERO, -I)],
            kappa: [ONE, I],
            proj: [p_plus, p_minus],
            b,
        }
    }

    fn row2(m: &Matrix2<C>) -> [C; 2] {
        [m[(1, 0)], m[(1, 1)]]
    }
}

const WHICH: [Which; 2] = [Which::Gg, Which::Gu];

/// Order-one coherences `(ρ₁₀, ρ₂₀)` and the depletion rate of `ρ⁽²⁾₀₀`,
/// integrated by trapezoid stepping with product-integrated memory.
pub fn time_domain_rate(tr: &HalfTransform, g: f64, gamma: f64, omega: f64, opts: &TimeDomainOptions) -> Result<RateReading> {
    let run = run_reduced(tr, g, gamma, omega, opts, None)?;
    Ok(run.reading)
}

/// Trajectory of [`time_domain_rate`]: coherences at every step and rates at
/// the steps in `rate_steps`.
#[derive(Debug, Clone)]
pub struct ReducedRun {
    pub step: f64,
    pub coherence: Vec<[C; 2]>,
    pub rates: Vec<(usize, f64)>,
    pub reading: RateReading,
}

pub fn reduced_trajectory(
    tr: &HalfTransform,
    g: f64,
    gamma: f64,
    omega: f64,
    opts: &TimeDomainOptions,
    rate_steps: &[usize],
) -> Result<ReducedRun> {
    run_reduced(tr, g, gamma, omega, opts, Some(rate_steps))
}

fn run_reduced(
    tr: &HalfTransform,
    g: f64,
    gamma: f64,
    omega: f64,
    opts: &TimeDomainOptions,
    extra: Option<&[usize]>,
) -> Result<ReducedRun> {
    if !(opts.step > 0.0 && opts.t_end > opts.step && opts.check_fraction > 0.0 && opts.check_fraction < 1.0) {
        return Err(Error::UnsupportedParams("time-domain step, t_end or check_fraction out of range".into()));
    }
    let h = opts.step;
    let steps = (opts.t_end / h).ceil() as usize;
    let check = ((opts.check_fraction * steps as f64) as usize).max(1);
    let kernel = Kernel::of(tr);
    let b = tr.mean_b();
    let gt = g * b;
    let alg = Algebra::new(g, b, gamma, omega);
    let t_mem = kernel.memory_time(gamma, opts.memory_floor, opts.t_end)?;
    let mem = ((t_mem / h).ceil() as usize).min(steps);

    // memory blocks M_k acting on c(t - kh) and rate rows r_k
    let mut m_blk = vec![Matrix2::<C>::zeros(); mem + 1];
    let mut r_row = vec![[ZERO; 2]; mem + 1];
    // cumulative source integrals
    let mut src = vec![Vector2::<C>::zeros(); mem + 1];
    let mut src_row = vec![ZERO; mem + 1];
    let zs = [C::new(omega - gt, 0.5 * gamma), C::new(omega + gt, 0.5 * gamma)];
    for (mi, &which) in WHICH.iter().enumerate() {
        let x = alg.x[mi];
        for (si, &z) in zs.iter().enumerate() {
            let (left, right) = kernel.hat_weights(which, z, h, mem);
            let px = alg.proj[si] * x;
            let py = alg.proj[si] * alg.y[mi];
            let xpy = x * py;
            let mut cum = ZERO;
            for k in 0..=mem {
                if k > 0 {
                    cum += right[k - 1] + left[k];
                }
                src[k] += xpy * cum;
                src_row[k] += alg.kappa[mi] * py[1] * cum;
            }
            if opts.variant == MemoryVariant::TimeNonlocal {
                let xpx = x * px;
                let row = Algebra::row2(&px);
                for k in 0..=mem {
                    let w = left[k] + right[k];
                    m_blk[k] += xpx * w;
                    r_row[k][0] += alg.kappa[mi] * row[0] * w;
                    r_row[k][1] += alg.kappa[mi] * row[1] * w;
                }
            }
        }
        if opts.variant == MemoryVariant::TimeLocal {
            // x u(τ) x u_h(-τ): frequencies (s' - s) g̃ with damping γ/2
            for (si, s) in [1.0, -1.0].iter().enumerate() {
                for (sj, s2) in [1.0, -1.0].iter().enumerate() {
                    let z = C::new((s2 - s) * gt, 0.5 * gamma);
                    let (left, right) = kernel.hat_weights(which, z, h, mem);
                    let op = x * alg.proj[si] * x * alg.proj[sj];
                    let rop = alg.proj[si] * x * alg.proj[sj];
                    let row = Algebra::row2(&rop);
                    let mut cum = ZERO;
                    for k in 0..=mem {
                        if k > 0 {
                            cum += right[k - 1] + left[k];
                        }
                        m_blk[k] += op * cum;
                        r_row[k][0] += alg.kappa[mi] * row[0] * cum;
                        r_row[k][1] += alg.kappa[mi] * row[1] * cum;
                    }
                }
            }
        }
    }

    let drive = Vector2::new(ZERO, -I * alg.b);
    let mut c: Vec<Vector2<C>> = Vec::with_capacity(steps + 1);
    c.push(Vector2::zeros());
    let mut f_prev = drive;
    let half = C::from(0.5 * h);
    let eye = Matrix2::<C>::identity();
    let nonlocal = opts.variant == MemoryVariant::TimeNonlocal;
    let solve0 = (eye - (alg.a - m_blk[0]) * half)
        .try_inverse()
        .ok_or(NumericalError::Singular("time-domain step matrix"))?;
    let mut rates = Vec::new();
    let rate_at = |n: usize, c: &[Vector2<C>]| -> f64 {
        let k_max = n.min(mem);
        let mut acc = src_row[k_max];
        if nonlocal {
            for k in 0..=k_max {
                let v = &c[n - k];
                acc += r_row[k][0] * v[0] + r_row[k][1] * v[1];
            }
        } else {
            let v = &c[n];
            acc += r_row[k_max][0] * v[0] + r_row[k_max][1] * v[1];
        }
        let dot = 2.0 * alg.b * c[n][1].im - 2.0 * acc.re;
        -dot
    };
    let mut reading_check = f64::NAN;
    for n in 1..=steps {
        let k_max = n.min(mem);
        let mut hist = Vector2::<C>::zeros();
        let (lhs_inv, local) = if nonlocal {
            for k in 1..=k_max.min(n - 1) {
                let m = &m_blk[k];
                let v = &c[n - k];
                hist[0] += m[(0, 0)] * v[0] + m[(0, 1)] * v[1];
                hist[1] += m[(1, 0)] * v[0] + m[(1, 1)] * v[1];
            }
            (solve0, m_blk[0])
        } else {
            let lam = m_blk[k_max];
            let inv = (eye - (alg.a - lam) * half).try_inverse().ok_or(NumericalError::Singular("time-domain step matrix"))?;
            (inv, lam)
        };
        let forcing = drive - src[k_max] - hist;
        let rhs = c[n - 1] + f_prev * half + forcing * half;
        let cn = lhs_inv * rhs;
        if !(cn[0].is_finite() && cn[1].is_finite()) {
            return Err(NumericalError::NonFinite("time-domain coherence").into());
        }
        f_prev = alg.a * cn - local * cn + forcing;
        c.push(cn);
        if n == check {
            reading_check = rate_at(n, &c);
        }
        if let Some(list) = extra {
            if list.contains(&n) {
                rates.push((n, rate_at(n, &c)));
            }
        }
    }
    let rate = rate_at(steps, &c);
    let reading = RateReading { omega, rate, rate_check: reading_check, memory_steps: mem };
    Ok(ReducedRun { step: h, coherence: c.iter().map(|v| [v[0], v[1]]).collect(), rates, reading })
}

/// Absorption from the time-domain rate on every grid point; fails when a
/// reading drifts by more than `opts.tolerance`.
pub fn time_domain_spectrum(engine: &SpectrumEngine, grid: &FrequencyGrid, opts: &TimeDomainOptions) -> Result<Spectrum> {
    let p = engine.params();
    // same effective width as the frequency-domain spectra
    let gamma = p.gamma().max(p.emission_regularization);
    let mut samples = Vec::with_capacity(grid.len());
    for seg in &grid.segments {
        for k in 0..seg.count {
            let w = seg.point(k);
            let r = time_domain_rate(engine.transforms(), p.g, gamma, w, opts)?;
            if r.drift() > opts.tolerance {
                return Err(NumericalError::NonConvergence { t_max: opts.t_end, drift: r.drift() }.into());
            }
            samples.push((w, r.rate));
        }
    }
    let text = alloc::format!("time-domain|{:?}|{:?}|{:?}|{:?}", engine.spectral_density().model(), p, grid, opts);
    Ok(Spectrum::from_raw(SpectrumKind::OracleAbsorption, samples, fnv1a(text.as_bytes()), Vec::new()))
}

// ---------------------------------------------------------------------------
// full operator integration

/// A 3×3 operator expanded in the probe amplitude, `A₀ + Ω A₁ + Ω² A₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ordered(pub [Matrix3<C>; 3]);

impl Ordered {
    pub fn zero() -> Self {
        Ordered([Matrix3::zeros(); 3])
    }

    pub fn identity() -> Self {
        Ordered([Matrix3::identity(), Matrix3::zeros(), Matrix3::zeros()])
    }

    pub fn order0(m: Matrix3<C>) -> Self {
        Ordered([m, Matrix3::zeros(), Matrix3::zeros()])
    }

    pub fn mul(&self, o: &Ordered) -> Ordered {
        let mut out = Ordered::zero();
        for k in 0..3 {
            for i in 0..=k {
                out.0[k] += self.0[i] * o.0[k - i];
            }
        }
        out
    }

    pub fn add(&self, o: &Ordered) -> Ordered {
        Ordered([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    pub fn sub(&self, o: &Ordered) -> Ordered {
        Ordered([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }

    pub fn scale(&self, s: C) -> Ordered {
        Ordered([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// Adjoint order by order (the probe amplitude is real).
    pub fn adjoint(&self) -> Ordered {
        Ordered([self.0[0].adjoint(), self.0[1].adjoint(), self.0[2].adjoint()])
    }

    fn norm1(&self) -> f64 {
        self.0.iter().map(|m| m.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `exp(self)` by scaling, Taylor series and squaring.
    pub fn exp(&self) -> Ordered {
        let mut s = 0;
        let mut a = *self;
        while a.norm1() > 0.25 {
            a = a.scale(C::from(0.5));
            s += 1;
        }
        let mut term = Ordered::identity();
        let mut sum = Ordered::identity();
        for k in 1..20 {
            term = term.mul(&a).scale(C::from(1.0 / k as f64));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

fn sigma(i: usize, j: usize) -> Matrix3<C> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = ONE;
    m
}

/// State of the full integrator: the current ordered density matrix and its
/// sampled history.
#[derive(Debug, Clone)]
pub struct KernelState {
    pub rho: Ordered,
    pub history: Vec<Ordered>,
    /// Highest probe order carried.
    pub order: usize,
}

/// Direct integration of the polaron-frame master equation on the three
/// states `{|g,0⟩, |g,1⟩, |e,0⟩}` with all probe orders up to two, the
/// loss term `-iγ/2(σ₁₁ + σ₂₂)`, trapezoid memory sums and Heun steps.
/// Meant for short runs; the cost grows quadratically with `steps`.
pub fn integrate_master_equation(
    tr: &HalfTransform,
    g: f64,
    gamma: f64,
    omega: f64,
    initial: Matrix3<C>,
    step: f64,
    steps: usize,
) -> Result<KernelState> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::UnsupportedParams("step must be finite and > 0".into()));
    }
    let kernel = Kernel::of(tr);
    let b = tr.mean_b();
    let h0 = sigma(0, 0) * C::from(omega)
        + (sigma(1, 2) + sigma(2, 1)) * C::from(g * b)
        + (sigma(1, 1) + sigma(2, 2)) * C::new(0.0, -0.5 * gamma);
    let h1 = (sigma(2, 0) + sigma(0, 2)) * C::from(b);
    let ham = Ordered([h0, h1, Matrix3::zeros()]);
    let x_g = Ordered([(sigma(2, 1) + sigma(1, 2)) * C::from(g), sigma(2, 0) + sigma(0, 2), Matrix3::zeros()]);
    let x_u = Ordered([(sigma(1, 2) - sigma(2, 1)) * (I * g), (sigma(0, 2) - sigma(2, 0)) * I, Matrix3::zeros()]);
    let xs = [x_g, x_u];
    let u1 = ham.scale(-I * step).exp();
    let mut props = Vec::with_capacity(steps + 1);
    props.push(Ordered::identity());
    for k in 0..steps {
        let next = props[k].mul(&u1);
        props.push(next);
    }
    let props_dag: Vec<Ordered> = props.iter().map(|u| u.adjoint()).collect();
    let gvals: Vec<[C; 2]> =
        (0..=steps).map(|k| [kernel.value(Which::Gg, k as f64 * step), kernel.value(Which::Gu, k as f64 * step)]).collect();

    let coherent = |rho: &Ordered| -> Ordered {
        // -i(Hρ - ρH†)
        ham.mul(rho).sub(&rho.mul(&ham.adjoint())).scale(-I)
    };
    let lag_term = |k: usize, rho: &Ordered| -> Ordered {
        let mut acc = Ordered::zero();
        for (m, x) in xs.iter().enumerate() {
            let inner = props[k].mul(&x.mul(rho)).mul(&props_dag[k]);
            let comm = x.mul(&inner).sub(&inner.mul(x));
            let t = comm.scale(gvals[k][m]);
            acc = acc.add(&t).add(&t.adjoint());
        }
        acc
    };
    // memory at step n with the k = 0 lag split off
    let memory_tail = |n: usize, hist: &[Ordered]| -> Ordered {
        let mut acc = Ordered::zero();
        for k in 1..=n {
            let w = if k == n { 0.5 * step } else { step };
            acc = acc.add(&lag_term(k, &hist[n - k]).scale(C::from(w)));
        }
        acc
    };
    let rhs = |n: usize, rho: &Ordered, tail: &Ordered| -> Ordered {
        let local = if n == 0 { Ordered::zero() } else { lag_term(0, rho).scale(C::from(0.5 * step)) };
        coherent(rho).sub(&local).sub(tail)
    };
    let rho0 = Ordered::order0(initial);
    let mut history = Vec::with_capacity(steps + 1);
    history.push(rho0);
    let mut f_n = rhs(0, &rho0, &Ordered::zero());
    for n in 0..steps {
        let tail_next = memory_tail(n + 1, &history);
        let pred = history[n].add(&f_n.scale(C::from(step)));
        let f_pred = rhs(n + 1, &pred, &tail_next);
        let next = history[n].add(&f_n.add(&f_pred).scale(C::from(0.5 * step)));
        f_n = rhs(n + 1, &next, &tail_next);
        history.push(next);
    }
    Ok(KernelState { rho: *history.last().unwrap(), history, order: 2 })
}
