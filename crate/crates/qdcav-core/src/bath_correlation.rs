//! Phonon propagator `Q(t)` and the bath Green's functions `G_g(t)`, `G_u(t)`.
//!
//! `Q(t) = ∫ J(ω)/ω² [(1 - cos ωt) coth(ω/2T) + i sin ωt] dω` is split into
//! three pieces: closed forms (ohmic-exponential pieces and delta lines), a
//! Filon sum over a uniform frequency grid (batched with an FFT on the
//! uniform time nodes), and an analytic power-law tail above the split
//! frequency written with generalized exponential integrals.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::fft;
use crate::quad::hermite_weights;
use crate::spectral_density::{x_coth, Shape, SpectralDensity};
use crate::special::{digamma, expint_e, ln_gamma, trigamma};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Gg,
    Gu,
}

/// Time-grid and frequency-grid controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathOptions {
    /// Upper bound on the uniform step; defaults to `(2π/ω_max)/16`.
    pub dt: Option<f64>,
    /// End of the uniform region; defaults to a model-dependent decay time.
    pub t_uniform: Option<f64>,
    /// Hard cap on the graded region.
    pub t_max: f64,
    /// Ratio of consecutive panel lengths in the graded region.
    pub grade: f64,
    /// The grid stops once `|G| < floor * |G(0)|`.
    pub floor: f64,
    /// Upper bound on the frequency step of the Filon sum.
    pub domega: Option<f64>,
    /// Grid length used for undamped delta lines.
    pub t_lines: f64,
}

impl Default for BathOptions {
    fn default() -> Self {
        BathOptions {
            dt: None,
            t_uniform: None,
            t_max: 1e8,
            grade: 1.02,
            floor: 1e-14,
            domega: None,
            t_lines: 1000.0,
        }
    }
}

/// Subtracted low-frequency ohmic piece `(c1/ω + e0) e^{-ω/ωc}` with closed-form `Q`.
#[derive(Debug, Clone, Copy)]
struct OhmicPiece {
    c1: f64,
    e0: f64,
    omega_c: f64,
}

impl OhmicPiece {
    fn eval(&self, t: f64, temperature: f64) -> (Complex64, Complex64) {
        let wc = self.omega_c;
        let den = Complex64::new(1.0, wc * t);
        let mut q = self.c1 * den.ln() + self.e0 * wc * Complex64::new(0.0, wc * t) / den;
        let mut dq = self.c1 * I * wc / den + self.e0 * I * wc * wc / (den * den);
        if temperature > 0.0 {
            let u = temperature / wc;
            let z0 = Complex64::new(1.0 + u, 0.0);
            let z = Complex64::new(1.0 + u, t * temperature);
            if self.c1 != 0.0 {
                q += 2.0 * self.c1 * (ln_gamma(z0).re - ln_gamma(z).re);
                dq += 2.0 * self.c1 * temperature * digamma(z).im;
            }
            if self.e0 != 0.0 {
                q += 2.0 * self.e0 * temperature * (digamma(z).re - digamma(z0).re);
                dq -= 2.0 * self.e0 * temperature * temperature * trigamma(z).im;
            }
        }
        (q, dq)
    }
}

/// Evaluates `Q(t)` and `Q'(t)` for one spectral density and temperature.
#[derive(Debug, Clone)]
pub(crate) struct QEngine {
    temperature: f64,
    ohmic: Option<OhmicPiece>,
    lines: Vec<(f64, f64)>,
    domega: f64,
    /// Filon samples: f_re, f_im, ω f_re, ω f_im and their ω-derivatives.
    x: [Vec<f64>; 4],
    dx: [Vec<f64>; 4],
    filon_const: f64,
    split: f64,
    /// `(p, a)` pairs: tail of `J/ω²` is `Σ a ω^{-p}`.
    tail: Vec<(u32, f64)>,
    n_exp: u32,
    phonon_free: bool,
}

fn poly_inverse_series(p: &[f64], terms: usize) -> Vec<f64> {
    let mut r: Vec<f64> = Vec::with_capacity(terms);
    for k in 0..terms {
        let mut s = if k == 0 { 1.0 } else { 0.0 };
        for j in 1..=k.min(p.len() - 1) {
            s -= p[j] * r[k - j];
        }
        r.push(s / p[0]);
    }
    r
}

fn fd_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        for k in 0..n {
            let (a, b) = if k == 0 { (0, 1.min(n - 1)) } else if k == n - 1 { (n - 2, n - 1) } else { (k - 1, k + 1) };
            d[k] = (f[b] - f[a]) / ((b - a) as f64 * h);
        }
        return d;
    }
    for k in 0..n {
        d[k] = if k >= 2 && k + 2 < n {
            (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h)
        } else if k < 2 {
            let s = &f[k..k + 5];
            (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h)
        } else {
            let s = &f[k - 4..k + 1];
            (25.0 * s[4] - 48.0 * s[3] + 36.0 * s[2] - 16.0 * s[1] + 3.0 * s[0]) / (12.0 * h)
        };
    }
    d
}

impl QEngine {
    pub(crate) fn new(sd: &SpectralDensity, temperature: f64, domega_max: f64) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::UnsupportedParams("temperature must be finite and >= 0".into()));
        }
        let mut engine = QEngine {
            temperature,
            ohmic: None,
            lines: Vec::new(),
            domega: 1.0,
            x: [Vec::new(), Vec::new(), Vec::new(), Vec::new()],
            dx: [Vec::new(), Vec::new(), Vec::new(), Vec::new()],
            filon_const: 0.0,
            split: 0.0,
            tail: Vec::new(),
            n_exp: 0,
            phonon_free: sd.is_phonon_free(),
        };
        if engine.phonon_free {
            return Ok(engine);
        }
        match &sd.shape {
            Shape::Lines(lines) => {
                engine.lines = lines.iter().map(|l| (l.omega, l.coupling * l.coupling)).collect();
            }
            Shape::Ohmic { kappa, omega_c } => {
                engine.ohmic = Some(OhmicPiece { c1: *kappa, e0: 0.0, omega_c: *omega_c });
            }
            Shape::Confined { n, omega_b, quarter_w2, norm, split, .. } => {
                let (n, omega_b, q, norm, split) = (*n, *omega_b, *quarter_w2, *norm, *split);
                if temperature > split / 15.0 {
                    return Err(Error::UnsupportedParams(
                        "temperature too high for the chosen split frequency".into(),
                    ));
                }
                engine.n_exp = n;
                engine.split = split;
                // D(ω) = (1 + 2ω/ωb + ω²/ωb²)(ωb² + q - 2ωb ω + ω²)
                let a = [1.0, 2.0 / omega_b, 1.0 / (omega_b * omega_b)];
                let b = [omega_b * omega_b + q, -2.0 * omega_b, 1.0];
                let mut dpoly = [0.0; 5];
                for i in 0..3 {
                    for j in 0..3 {
                        dpoly[i + j] += a[i] * b[j];
                    }
                }
                let omega_c = 0.5 * omega_b;
                let piece = if n == 1 {
                    let inv = poly_inverse_series(&dpoly, 3);
                    let c1 = norm * inv[0];
                    let e0 = norm * inv[1] + c1 / omega_c;
                    // limit of (h - s)/ω at ω = 0
                    let lim = norm * inv[2] - c1 / (2.0 * omega_c * omega_c) + e0 / omega_c;
                    Some((OhmicPiece { c1, e0, omega_c }, lim))
                } else {
                    None
                };
                engine.ohmic = piece.map(|p| p.0);
                // r(ω) = h(ω) - s(ω) and r(ω)/ω, free of cancellation near 0
                let r_and_r_over = |w: f64| -> (f64, f64) {
                    match piece {
                        None => (sd.j_over_pow(w, 2), sd.j_over_pow(w, 3)),
                        Some((p, lim)) => {
                            if w == 0.0 {
                                return (0.0, lim);
                            }
                            let d0 = dpoly[0];
                            let dw = dpoly[0] + w * (dpoly[1] + w * (dpoly[2] + w * (dpoly[3] + w * dpoly[4])));
                            let p1 = dpoly[1] + w * (dpoly[2] + w * (dpoly[3] + w * dpoly[4]));
                            let ex = (-w / p.omega_c).exp();
                            let g_minus = -norm * p1 / (d0 * dw) + p.c1 * (-(-w / p.omega_c).exp_m1()) / w;
                            let r = g_minus - p.e0 * ex;
                            (r, r / w)
                        }
                    }
                };
                let k_max = (split / domega_max).ceil().max(8.0) as usize;
                let domega = split / k_max as f64;
                engine.domega = domega;
                let mut x: [Vec<f64>; 4] = [
                    Vec::with_capacity(k_max + 1),
                    Vec::with_capacity(k_max + 1),
                    Vec::with_capacity(k_max + 1),
                    Vec::with_capacity(k_max + 1),
                ];
                for k in 0..=k_max {
                    let w = k as f64 * domega;
                    let (r, r_over) = r_and_r_over(w);
                    let f_re = r_over * x_coth(w, temperature);
                    x[0].push(f_re);
                    x[1].push(r);
                    x[2].push(w * f_re);
                    x[3].push(w * r);
                }
                engine.dx = [
                    fd_derivative(&x[0], domega),
                    fd_derivative(&x[1], domega),
                    fd_derivative(&x[2], domega),
                    fd_derivative(&x[3], domega),
                ];
                engine.x = x;
                engine.filon_const = engine.filon_sums(0.0)[0].re;
                if sd.has_power_tail() {
                    engine.tail = sd
                        .laurent()
                        .iter()
                        .enumerate()
                        .map(|(k, a)| ((6 + k as i32 - n as i32) as u32, *a))
                        .collect();
                }
            }
        }
        Ok(engine)
    }

    /// `∫_0^W x_j(ω) e^{-iωt} dω` for the four sampled functions.
    fn filon_sums(&self, t: f64) -> [Complex64; 4] {
        let k = self.x[0].len();
        if k < 2 {
            return [ZERO; 4];
        }
        let h = self.domega;
        let w = hermite_weights(Complex64::new(-t * h, 0.0));
        let step = Complex64::new((t * h).cos(), -(t * h).sin());
        let mut acc = [ZERO; 4];
        let mut phase = Complex64::new(1.0, 0.0);
        for i in 0..k - 1 {
            if i % 256 == 0 {
                let arg = -(i as f64) * h * t;
                phase = Complex64::new(arg.cos(), arg.sin());
            }
            for j in 0..4 {
                let xs = &self.x[j];
                let ds = &self.dx[j];
                acc[j] += phase * (w[0] * xs[i] + w[1] * (h * ds[i]) + w[2] * xs[i + 1] + w[3] * (h * ds[i + 1]));
            }
            phase *= step;
        }
        for a in acc.iter_mut() {
            *a *= h;
        }
        acc
    }

    fn tail_terms(&self, t: f64) -> (Complex64, Complex64) {
        if self.tail.is_empty() {
            return (ZERO, ZERO);
        }
        let w = self.split;
        let z = Complex64::new(0.0, w * t);
        let mut q = ZERO;
        let mut dq = ZERO;
        for &(p, a) in &self.tail {
            let wp = w.powi(1 - p as i32);
            let e = expint_e(p, z);
            q += a * wp * (1.0 / (p as f64 - 1.0) - e);
            // J/ω has exponent p - 1
            let wp1 = w.powi(2 - p as i32);
            dq += I * a * wp1 * expint_e(p - 1, z);
        }
        (q, dq)
    }

    fn tail_const(&self) -> f64 {
        self.tail
            .iter()
            .map(|&(p, a)| a * self.split.powi(1 - p as i32) / (p as f64 - 1.0))
            .sum()
    }

    fn closed_forms(&self, t: f64) -> (Complex64, Complex64) {
        let mut q = ZERO;
        let mut dq = ZERO;
        if let Some(p) = &self.ohmic {
            let (a, b) = p.eval(t, self.temperature);
            q += a;
            dq += b;
        }
        for &(w, l2) in &self.lines {
            let th = x_coth(w, self.temperature) / w;
            let (s, c) = (w * t).sin_cos();
            q += l2 / (w * w) * Complex64::new((1.0 - c) * th, s);
            dq += l2 / w * Complex64::new(s * th, c);
        }
        (q, dq)
    }

    fn combine(&self, f: [Complex64; 4]) -> (Complex64, Complex64) {
        let q = Complex64::new(self.filon_const - f[0].re, -f[1].im);
        let dq = Complex64::new(-f[2].im, f[3].re);
        (q, dq)
    }

    /// `(Q(t), Q'(t))` by direct summation.
    pub(crate) fn eval(&self, t: f64) -> (Complex64, Complex64) {
        if self.phonon_free {
            return (ZERO, ZERO);
        }
        let (mut q, mut dq) = self.closed_forms(t);
        if !self.x[0].is_empty() {
            let (a, b) = self.combine(self.filon_sums(t));
            let (c, d) = self.tail_terms(t);
            q += a + c;
            dq += b + d;
        }
        (q, dq)
    }

    /// `(Q, Q')` at `t_j = j dt` for `j < count`; `dt` must come from
    /// [`Self::fft_step`]. Points past one period `2π/domega` of the
    /// frequency sum are evaluated directly.
    pub(crate) fn eval_uniform(&self, dt: f64, count: usize) -> Vec<(Complex64, Complex64)> {
        let mut out: Vec<(Complex64, Complex64)> = Vec::with_capacity(count);
        if self.phonon_free {
            out.resize(count, (ZERO, ZERO));
            return out;
        }
        let k = self.x[0].len();
        let mut f: Vec<[Complex64; 4]> = vec![[ZERO; 4]; count];
        let mut nfft = count;
        if k >= 2 {
            let h = self.domega;
            nfft = (2.0 * core::f64::consts::PI / (h * dt)).round() as usize;
            debug_assert!(nfft.is_power_of_two());
            let kk = k - 1;
            for j in 0..4 {
                let mut dx_fft = vec![ZERO; nfft];
                let mut x_fft = vec![ZERO; nfft];
                for i in 0..k {
                    x_fft[i % nfft] += self.x[j][i];
                    dx_fft[i % nfft] += self.dx[j][i];
                }
                fft(&mut x_fft);
                fft(&mut dx_fft);
                for (idx, fj) in f.iter_mut().enumerate().take(nfft) {
                    let t = idx as f64 * dt;
                    let w = hermite_weights(Complex64::new(-t * h, 0.0));
                    let shift = Complex64::new((t * h).cos(), (t * h).sin());
                    let end_arg = -(kk as f64) * h * t;
                    let end = Complex64::new(end_arg.cos(), end_arg.sin());
                    let s0x = x_fft[idx] - self.x[j][kk] * end;
                    let s1x = shift * (x_fft[idx] - self.x[j][0]);
                    let s0d = dx_fft[idx] - self.dx[j][kk] * end;
                    let s1d = shift * (dx_fft[idx] - self.dx[j][0]);
                    fj[j] = h * (w[0] * s0x + w[1] * h * s0d + w[2] * s1x + w[3] * h * s1d);
                }
            }
        }
        for (idx, fj) in f.into_iter().enumerate() {
            let t = idx as f64 * dt;
            if idx >= nfft {
                out.push(self.eval(t));
                continue;
            }
            let (mut q, mut dq) = self.closed_forms(t);
            if k >= 2 {
                let (a, b) = self.combine(fj);
                let (c, d) = self.tail_terms(t);
                q += a + c;
                dq += b + d;
            }
            out.push((q, dq));
        }
        out
    }

    /// Largest `dt <= dt_max` for which the uniform nodes fall on an FFT grid
    /// with at least `count` points.
    pub(crate) fn fft_step(&self, dt_max: f64, count: usize) -> f64 {
        if self.x[0].len() < 2 {
            return dt_max;
        }
        let h = self.domega;
        let need = (2.0 * core::f64::consts::PI / (h * dt_max)).ceil() as usize;
        let nfft = need.max(count).next_power_of_two();
        2.0 * core::f64::consts::PI / (h * nfft as f64)
    }

    /// `lim_{t→∞} Re Q(t)` for densities with a finite Huang–Rhys factor.
    pub(crate) fn huang_rhys_limit(&self) -> f64 {
        let mut s = self.filon_const + self.tail_const();
        for &(w, l2) in &self.lines {
            s += l2 / (w * w * w) * x_coth(w, self.temperature);
        }
        s
    }
}

/// `(G_g, G_g', G_u, G_u')` from `Q`, `Q'` and `⟨B⟩`.
///
/// With `R = Q + 2 ln⟨B⟩` these are `2⟨B⟩² sinh²(R/2)` and `-⟨B⟩² sinh R`,
/// which stay accurate where `C = e^{-Q}` has relaxed onto `⟨B⟩²`.
pub fn greens_from_q(q: Complex64, dq: Complex64, mean_b: f64) -> [Complex64; 4] {
    if mean_b == 0.0 {
        let c = 0.5 * (-q).exp();
        return [c, -dq * c, c, -dq * c];
    }
    let b2 = mean_b * mean_b;
    let r = q + 2.0 * mean_b.ln();
    let (sh, ch) = (r.sinh(), r.cosh());
    let sh2 = (0.5 * r).sinh();
    [2.0 * b2 * sh2 * sh2, b2 * sh * dq, -b2 * sh, -b2 * ch * dq]
}

fn quarter_width(sd: &SpectralDensity) -> f64 {
    match &sd.shape {
        Shape::Confined { quarter_w2, .. } => quarter_w2.sqrt(),
        _ => f64::INFINITY,
    }
}

/// Sampled bath correlations on a composite time grid.
#[derive(Debug, Clone)]
pub struct BathCorrelation {
    sd: SpectralDensity,
    temperature: f64,
    mean_b: f64,
    engine: QEngine,
    pub(crate) t: Vec<f64>,
    pub(crate) q: Vec<Complex64>,
    pub(crate) dq: Vec<Complex64>,
    /// `[G_g, G_g', G_u, G_u']` at every node.
    pub(crate) g: Vec<[Complex64; 4]>,
    /// First and last index of the nodes spaced exactly `dt` apart.
    pub(crate) uniform: (usize, usize),
    pub(crate) dt: f64,
}

impl BathCorrelation {
    pub fn new(sd: &SpectralDensity, temperature: f64) -> Result<Self> {
        Self::with_options(sd, temperature, BathOptions::default())
    }

    pub fn with_options(sd: &SpectralDensity, temperature: f64, opts: BathOptions) -> Result<Self> {
        let omega_b = sd.model().omega_b();
        let mut domega = opts.domega.unwrap_or(0.005 * omega_b);
        if let Shape::Confined { quarter_w2, .. } = &sd.shape {
            domega = domega.min(2.0 * quarter_w2.sqrt() / 600.0);
        }
        if temperature > 0.0 {
            domega = domega.min(temperature / 8.0);
        }
        let engine = QEngine::new(sd, temperature, domega)?;
        let finite_s = !matches!(sd.shape, Shape::Ohmic { .. } | Shape::Confined { n: 1, .. });
        let mean_b = if sd.is_phonon_free() {
            1.0
        } else if finite_s {
            (-0.5 * engine.huang_rhys_limit()).exp()
        } else {
            0.0
        };
        let omega_max = sd.split().max(10.0 * omega_b);
        let per_period = if quarter_width(sd) < 0.1 { 16.0 } else { 32.0 };
        let dt_max = opts.dt.unwrap_or(2.0 * core::f64::consts::PI / omega_max / per_period);
        let hard = matches!(sd.shape, Shape::Confined { hard: true, .. });
        let lines = matches!(sd.shape, Shape::Lines(_));
        let t_uniform = opts.t_uniform.unwrap_or(match &sd.shape {
            Shape::Confined { quarter_w2, .. } if !hard => (56.0 / quarter_w2.sqrt()).max(40.0 / omega_b),
            Shape::Confined { .. } => opts.t_max.min(1000.0 / omega_b),
            Shape::Lines(_) => opts.t_lines,
            Shape::Ohmic { .. } => 40.0 / omega_b,
        });
        let count_est = (t_uniform / dt_max).ceil() as usize + 1;
        let dt = engine.fft_step(dt_max, count_est);
        let count = (t_uniform / dt).ceil() as usize + 1;

        let mut bath = BathCorrelation {
            sd: sd.clone(),
            temperature,
            mean_b,
            engine,
            t: Vec::new(),
            q: Vec::new(),
            dq: Vec::new(),
            g: Vec::new(),
            uniform: (0, 1),
            dt,
        };
        if sd.is_phonon_free() {
            bath.t = vec![0.0, dt];
            bath.q = vec![ZERO; 2];
            bath.dq = vec![ZERO; 2];
            bath.g = vec![[ZERO; 4]; 2];
            return Ok(bath);
        }

        // refinement toward t = 0
        let n_ref = 20usize.min(count - 1);
        let mut near: Vec<f64> = Vec::new();
        let mut tt = n_ref as f64 * dt / 1.1;
        while tt > 1e-6 * dt && n_ref > 1 {
            near.push(tt);
            tt /= 1.1;
        }
        near.reverse();
        let push = |b: &mut BathCorrelation, t: f64, q: Complex64, dq: Complex64| {
            b.t.push(t);
            b.q.push(q);
            b.dq.push(dq);
            b.g.push(greens_from_q(q, dq, mean_b));
        };
        let uniform = bath.engine.eval_uniform(dt, count);
        push(&mut bath, 0.0, uniform[0].0, uniform[0].1);
        for &t in &near {
            let (q, dq) = bath.engine.eval(t);
            push(&mut bath, t, q, dq);
        }
        let first = bath.t.len();
        for (j, &(q, dq)) in uniform.iter().enumerate().skip(n_ref.max(1)) {
            push(&mut bath, j as f64 * dt, q, dq);
        }
        bath.uniform = (first, bath.t.len() - 1);
        if !(hard || lines) {
            let g0 = bath.g[0][0].norm().max(bath.g[0][2].norm());
            let mut t = *bath.t.last().unwrap();
            let mut h = dt;
            while t < opts.t_max {
                h = (h * opts.grade).max(dt).min(t * (opts.grade - 1.0)).max(dt);
                t += h;
                let (q, dq) = bath.engine.eval(t);
                push(&mut bath, t, q, dq);
                let gl = bath.g.last().unwrap();
                if gl[0].norm().max(gl[2].norm()) < opts.floor * g0 {
                    break;
                }
            }
        }
        if bath.q.iter().any(|q| !(q.re.is_finite() && q.im.is_finite())) {
            return Err(crate::error::NumericalError::NonFinite("bath propagator").into());
        }
        Ok(bath)
    }

    pub fn spectral_density(&self) -> &SpectralDensity {
        &self.sd
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn mean_b(&self) -> f64 {
        self.mean_b
    }

    pub fn uniform_step(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn end_time(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// `Q(t)` evaluated directly (no interpolation).
    pub fn propagator_q(&self, t: f64) -> Complex64 {
        self.engine.eval(t.abs()).0
    }

    pub fn propagator_q_and_derivative(&self, t: f64) -> (Complex64, Complex64) {
        self.engine.eval(t)
    }

    pub fn green(&self, which: Which, t: f64) -> Complex64 {
        let (q, dq) = self.engine.eval(t);
        let g = greens_from_q(q, dq, self.mean_b);
        match which {
            Which::Gg => g[0],
            Which::Gu => g[2],
        }
    }

    pub fn green_g(&self, t: f64) -> Complex64 {
        self.green(Which::Gg, t)
    }

    pub fn green_u(&self, t: f64) -> Complex64 {
        self.green(Which::Gu, t)
    }

    /// Rows `(t, Q, G_g, G_u)` at the grid nodes.
    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64, Complex64, Complex64)> + '_ {
        (0..self.t.len()).map(move |i| (self.t[i], self.q[i], self.g[i][0], self.g[i][2]))
    }

    /// `(G, G')` at node `i`.
    pub(crate) fn node(&self, which: Which, i: usize) -> (Complex64, Complex64) {
        let g = &self.g[i];
        match which {
            Which::Gg => (g[0], g[1]),
            Which::Gu => (g[2], g[3]),
        }
    }

    /// Cubic Hermite interpolation of `(G, G')` between grid nodes.
    pub fn interpolate(&self, which: Which, t: f64) -> (Complex64, Complex64) {
        let n = self.t.len();
        if t >= self.t[n - 1] {
            return self.node(which, n - 1);
        }
        let i = match self.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.node(which, i),
            Err(i) => i - 1,
        };
        let (a, b) = (self.t[i], self.t[i + 1]);
        let h = b - a;
        let s = (t - a) / h;
        let (f0, d0) = self.node(which, i);
        let (f1, d1) = self.node(which, i + 1);
        let h00 = 1.0 - s * s * (3.0 - 2.0 * s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let v = f0 * h00 + d0 * (h * h10) + f1 * h01 + d1 * (h * h11);
        let dh00 = 6.0 * s * (s - 1.0) / h;
        let dh10 = (1.0 - s) * (1.0 - 3.0 * s);
        let dh01 = -dh00;
        let dh11 = s * (3.0 * s - 2.0);
        let dv = f0 * dh00 + d0 * dh10 + f1 * dh01 + d1 * dh11;
        (v, dv)
    }
}

pub fn propagator_q(sd: &SpectralDensity, temperature: f64, t: f64) -> Result<Complex64> {
    let engine = QEngine::new(sd, temperature, 0.005 * sd.model().omega_b())?;
    Ok(engine.eval(t).0)
}
