//! One-sided Fourier transforms `Ĝ(z) = ∫_0^∞ e^{izt} G(t) dt`, `z = ω + iγ/2`.
//!
//! `G″ = Re Ĝ` and `G′ = Im Ĝ`. Sampled correlations are integrated panel by
//! panel with a Filon rule on the cubic Hermite interpolant; the remainder
//! past the last node is closed with an exponential fitted to `G` and `G'`.
//! Undamped delta lines have exact pole sums instead.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::bath_correlation::{BathCorrelation, BathOptions, Which};
use crate::error::{Error, Result};
use crate::fft::ChirpPlan;
use crate::quad::hermite_weights;
use crate::spectral_density::{x_coth, SpectralDensity};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative size of the fitted tail above which a value is flagged.
pub const TAIL_WARN: f64 = 1e-4;

/// `Im z · t` beyond which the remaining integrand is below `e^{-40}`.
const DAMPED: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    /// `|tail| / |Ĝ|`, or an estimate of it when no decaying fit exists.
    pub tail_fraction: f64,
}

impl TransformValue {
    pub fn g_prime(&self) -> f64 {
        self.value.im
    }

    pub fn g_double_prime(&self) -> f64 {
        self.value.re
    }

    pub fn accuracy_warning(&self) -> bool {
        !(self.tail_fraction <= TAIL_WARN)
    }

    fn exact(value: Complex64) -> Self {
        TransformValue { value, tail_fraction: 0.0 }
    }
}

#[derive(Debug, Clone)]
enum Source {
    Sampled(BathCorrelation),
    /// `G(t) = Σ w e^{-iνt}` as `(ν, w)` pairs for `G_g` and `G_u`.
    Lines { g: Vec<(f64, f64)>, u: Vec<(f64, f64)> },
}

#[derive(Debug, Clone)]
pub struct HalfTransform {
    source: Source,
    mean_b: f64,
    temperature: f64,
}

/// Fourier coefficients of `exp(S[(n+1)e^{-ix} + n e^{ix}])` keyed by
/// harmonic `m` (coefficient of `e^{-imx}`).
fn mode_series(s: f64, nbar: f64) -> BTreeMap<i64, f64> {
    let mut out = BTreeMap::new();
    let a = s * (nbar + 1.0);
    let b = s * nbar;
    let pmax = (a + 12.0 * a.sqrt() + 40.0) as i64;
    let qmax = if b > 0.0 { (b + 12.0 * b.sqrt() + 40.0) as i64 } else { 0 };
    let mut fp = 1.0;
    for p in 0..=pmax {
        if p > 0 {
            fp *= a / p as f64;
        }
        let mut fq = 1.0;
        for q in 0..=qmax {
            if q > 0 {
                fq *= b / q as f64;
            }
            let w = fp * fq;
            if w == 0.0 {
                break;
            }
            *out.entry(p - q).or_insert(0.0) += w;
        }
    }
    out
}

impl HalfTransform {
    pub fn new(sd: &SpectralDensity, temperature: f64) -> Result<Self> {
        Self::with_options(sd, temperature, BathOptions::default())
    }

    pub fn with_options(sd: &SpectralDensity, temperature: f64, opts: BathOptions) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::UnsupportedParams("temperature must be finite and >= 0".into()));
        }
        let lines = sd.lines();
        if sd.is_phonon_free() || !lines.is_empty() {
            return Ok(Self::from_lines(sd, temperature));
        }
        let bath = BathCorrelation::with_options(sd, temperature, opts)?;
        Ok(Self::from_bath(bath))
    }

    pub fn from_bath(bath: BathCorrelation) -> Self {
        HalfTransform { mean_b: bath.mean_b(), temperature: bath.temperature(), source: Source::Sampled(bath) }
    }

    fn from_lines(sd: &SpectralDensity, temperature: f64) -> Self {
        // C(t) = e^{-A} Π_k Σ_m c_{k,m} e^{-i m ω_k t}; b⁴/C carries (-1)^m, so
        // G_g collects even total orders and G_u odd ones.
        let mut total: BTreeMap<(i64, i64), (f64, f64)> = BTreeMap::new();
        total.insert((0, 0), (0.0, 1.0));
        let mut a_sum = 0.0;
        for line in sd.lines() {
            let s = line.coupling * line.coupling / (line.omega * line.omega);
            let nbar = if temperature > 0.0 {
                0.5 * (x_coth(line.omega, temperature) / line.omega - 1.0)
            } else {
                0.0
            };
            a_sum += s * (2.0 * nbar + 1.0);
            let series = mode_series(s, nbar);
            let mut next: BTreeMap<(i64, i64), (f64, f64)> = BTreeMap::new();
            for (&(_, parity), &(nu, w)) in &total {
                for (&m, &c) in &series {
                    let nu2 = nu + m as f64 * line.omega;
                    let key = ((nu2 * 1e9).round() as i64, (parity + m).rem_euclid(2));
                    let e = next.entry(key).or_insert((nu2, 0.0));
                    e.1 += w * c;
                }
            }
            total = next;
        }
        let b2 = (-a_sum).exp();
        let mut g = Vec::new();
        let mut u = Vec::new();
        for (&(key, parity), &(nu, w)) in &total {
            let w = w * b2;
            if parity == 0 {
                let w = if key == 0 { w - b2 } else { w };
                if w.abs() > 1e-300 {
                    g.push((nu, w));
                }
            } else if w.abs() > 1e-300 {
                u.push((nu, w));
            }
        }
        HalfTransform {
            source: Source::Lines { g, u },
            mean_b: if sd.is_phonon_free() { 1.0 } else { b2.sqrt() },
            temperature,
        }
    }

    pub fn mean_b(&self) -> f64 {
        self.mean_b
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn bath(&self) -> Option<&BathCorrelation> {
        match &self.source {
            Source::Sampled(b) => Some(b),
            Source::Lines { .. } => None,
        }
    }

    /// Line weights `(ν, w)` with `G(t) = Σ w e^{-iνt}` for delta-mode baths.
    pub fn lines(&self, which: Which) -> Option<&[(f64, f64)]> {
        match &self.source {
            Source::Lines { g, u } => Some(match which {
                Which::Gg => g,
                Which::Gu => u,
            }),
            Source::Sampled(_) => None,
        }
    }

    /// `(Ĝ_g(z), Ĝ_u(z))` in one pass over the samples.
    pub fn transform_pair(&self, z: Complex64) -> (TransformValue, TransformValue) {
        match &self.source {
            Source::Lines { g, u } => {
                let f = |lines: &[(f64, f64)]| lines.iter().map(|&(nu, w)| w * I / (z - nu)).sum::<Complex64>();
                (TransformValue::exact(f(g)), TransformValue::exact(f(u)))
            }
            Source::Sampled(bath) => sampled_pair(bath, z),
        }
    }

    pub fn transform(&self, which: Which, z: Complex64) -> TransformValue {
        let (g, u) = self.transform_pair(z);
        match which {
            Which::Gg => g,
            Which::Gu => u,
        }
    }

    /// `(Ĝ_g, Ĝ_u)` at `z_m = ω0 + m·step + iγ/2` for `m < count`.
    pub fn transform_grid(&self, omega0: f64, step: f64, count: usize, gamma: f64) -> Vec<(TransformValue, TransformValue)> {
        match &self.source {
            Source::Sampled(bath) => sampled_grid(bath, omega0, step, count, gamma),
            Source::Lines { .. } => (0..count)
                .map(|m| self.transform_pair(Complex64::new(omega0 + m as f64 * step, 0.5 * gamma)))
                .collect(),
        }
    }

    /// `(G′(ω), G″(ω))` at `z = ω + iγ/2`.
    pub fn transform_at(&self, which: Which, omega: f64, gamma: f64) -> Result<(f64, f64)> {
        if !(gamma.is_finite() && gamma >= 0.0 && omega.is_finite()) {
            return Err(Error::UnsupportedParams("transform needs finite omega and gamma >= 0".into()));
        }
        let v = self.transform(which, Complex64::new(omega, 0.5 * gamma));
        Ok((v.g_prime(), v.g_double_prime()))
    }
}

/// Adds panels `lo..hi` of the Hermite-Filon sum at `z`; returns `false`
/// once the damping `e^{-Im z t}` has wiped out everything further on.
fn direct_panels(bath: &BathCorrelation, z: Complex64, lo: usize, hi: usize, acc: &mut [Complex64; 2]) -> bool {
    let t = &bath.t;
    let g = &bath.g;
    let mut h_prev = f64::NAN;
    let mut w = [ZERO; 4];
    let mut step = ZERO;
    let mut phase = ZERO;
    let mut since_anchor = 0usize;
    for i in lo..hi {
        if z.im * t[i] > DAMPED {
            return false;
        }
        let h = t[i + 1] - t[i];
        if h != h_prev {
            w = hermite_weights(z * h);
            step = (I * z * h).exp();
            h_prev = h;
            phase = (I * z * t[i]).exp();
            since_anchor = 0;
        } else if since_anchor >= 256 {
            phase = (I * z * t[i]).exp();
            since_anchor = 0;
        }
        let (a, b) = (&g[i], &g[i + 1]);
        acc[0] += phase * h * (w[0] * a[0] + w[1] * h * a[1] + w[2] * b[0] + w[3] * h * b[1]);
        acc[1] += phase * h * (w[0] * a[2] + w[1] * h * a[3] + w[2] * b[2] + w[3] * h * b[3]);
        phase *= step;
        since_anchor += 1;
    }
    true
}

/// Closes the sum past the last node with an exponential fitted to `G`, `G'`.
fn close_tail(bath: &BathCorrelation, z: Complex64, acc: [Complex64; 2], open: bool) -> (TransformValue, TransformValue) {
    if !open {
        return (
            TransformValue { value: acc[0], tail_fraction: 0.0 },
            TransformValue { value: acc[1], tail_fraction: 0.0 },
        );
    }
    let t_end = *bath.t.last().unwrap();
    let last = bath.g.last().unwrap();
    let close = |acc: Complex64, gv: Complex64, dg: Complex64| -> TransformValue {
        if gv.norm() == 0.0 {
            return TransformValue { value: acc, tail_fraction: 0.0 };
        }
        let s = -dg / gv;
        let den = s - I * z;
        if den.re <= 0.0 {
            // no decaying fit (noise at the floor): drop the tail, report its size
            let bound = gv.norm() / z.norm().max(1.0 / t_end);
            return TransformValue { value: acc, tail_fraction: bound / acc.norm().max(1e-300) };
        }
        let tail = gv * (I * z * t_end).exp() / den;
        let value = acc + tail;
        TransformValue { value, tail_fraction: tail.norm() / value.norm().max(1e-300) }
    };
    (close(acc[0], last[0], last[1]), close(acc[1], last[2], last[3]))
}

fn sampled_pair(bath: &BathCorrelation, z: Complex64) -> (TransformValue, TransformValue) {
    let mut acc = [ZERO; 2];
    let open = direct_panels(bath, z, 0, bath.t.len() - 1, &mut acc);
    close_tail(bath, z, acc, open)
}

/// Batched version of [`sampled_pair`] on `z_m = ω0 + m·step + iγ/2`; the
/// uniformly spaced nodes go through one chirp transform per sequence.
fn sampled_grid(bath: &BathCorrelation, omega0: f64, step: f64, count: usize, gamma: f64) -> Vec<(TransformValue, TransformValue)> {
    let (ia, ib) = bath.uniform;
    let panels = ib - ia;
    let n = bath.t.len();
    let zm = |m: usize| Complex64::new(omega0 + m as f64 * step, 0.5 * gamma);
    if count < 16 || panels < 256 || step == 0.0 {
        return (0..count).map(|m| sampled_pair(bath, zm(m))).collect();
    }
    let h = bath.dt;
    let t_a = bath.t[ia];
    let plan = ChirpPlan::new(panels + 1, omega0, h, step, count);
    let seq = |c: usize| -> Vec<Complex64> {
        (0..=panels)
            .map(|k| bath.g[ia + k][c] * (-0.5 * gamma * h * k as f64).exp())
            .collect()
    };
    let sums: Vec<Vec<Complex64>> = (0..4).map(|c| plan.apply(&seq(c))).collect();
    let first = &bath.g[ia];
    let last = &bath.g[ib];
    (0..count)
        .map(|m| {
            let z = zm(m);
            let mut acc = [ZERO; 2];
            let mut open = direct_panels(bath, z, 0, ia, &mut acc);
            if open {
                let w = hermite_weights(z * h);
                let e_end = (I * z * (panels as f64 * h)).exp();
                let back = (-I * z * h).exp();
                let pref = h * (I * z * t_a).exp();
                for (j, c) in [(0usize, 0usize), (1, 2)] {
                    let pa = sums[c][m];
                    let pd = sums[c + 1][m];
                    acc[j] += pref
                        * (w[0] * (pa - last[c] * e_end)
                            + w[1] * h * (pd - last[c + 1] * e_end)
                            + w[2] * back * (pa - first[c])
                            + w[3] * h * back * (pd - first[c + 1]));
                }
                open = direct_panels(bath, z, ib, n - 1, &mut acc);
            }
            close_tail(bath, z, acc, open)
        })
        .collect()
}

/// `G_±(ω) = Ĝ_g(Δω_± + iγ/2) + Ĝ_u(Δω_∓ + iγ/2)` with `Δω_± = ω ∓ g̃`.
pub fn combined_pm(tr: &HalfTransform, omega: f64, g_tilde: f64, gamma: f64) -> (Complex64, Complex64) {
    let zp = Complex64::new(omega - g_tilde, 0.5 * gamma);
    let zm = Complex64::new(omega + g_tilde, 0.5 * gamma);
    let (gp, up) = tr.transform_pair(zp);
    let (gm, um) = tr.transform_pair(zm);
    (gp.value + um.value, gm.value + up.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_density::PhononModel;

    #[test]
    fn delta_line_weights_reproduce_time_domain() {
        let sd = SpectralDensity::new(PhononModel::delta_mode(1.0, 1.0)).unwrap();
        for &temp in &[0.0, 0.4] {
            let tr = HalfTransform::new(&sd, temp).unwrap();
            let bath = BathCorrelation::new(&sd, temp).unwrap();
            for &t in &[0.0, 0.3, 2.0, 17.5] {
                for which in [Which::Gg, Which::Gu] {
                    let from_lines: Complex64 = tr
                        .lines(which)
                        .unwrap()
                        .iter()
                        .map(|&(nu, w)| w * Complex64::new(0.0, -nu * t).exp())
                        .sum();
                    let direct = bath.green(which, t);
                    assert!((from_lines - direct).norm() < 1e-13, "T={temp} t={t}");
                }
            }
        }
    }

    #[test]
    fn ohmic_zero_temperature_closed_form() {
        // Ĝ_C(z) = -i e^{-z} (-z)^{ν-1} Γ(1-ν, -z) for J = ν ω e^{-ω}, T = 0;
        // values from mpmath's upper incomplete gamma with ν = 1/2.
        let cases = [
            (Complex64::new(0.3, 0.01), Complex64::new(2.406_313_032_355_912_3, 1.580_215_982_936_931_5)),
            (Complex64::new(-0.5, 0.002), Complex64::new(0.003_999_954_012_769_588, -1.311_345_839_565_709_7)),
            (Complex64::new(2.0, 0.5), Complex64::new(0.282_394_252_927_311_24, 0.517_307_590_620_205_8)),
            (Complex64::new(0.02, 0.0005), Complex64::new(12.282_668_372_866_328, 1.813_902_144_969_621_2)),
        ];
        let sd = SpectralDensity::new(PhononModel::ohmic(0.5, 1.0)).unwrap();
        let tr = HalfTransform::new(&sd, 0.0).unwrap();
        assert_eq!(tr.mean_b(), 0.0);
        for (z, want) in cases {
            let (g, u) = tr.transform_pair(z);
            assert!((2.0 * g.value - want).norm() < 1e-7 * want.norm(), "z={z}: {} vs {want}", 2.0 * g.value);
            assert!((g.value - u.value).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
        let tr = HalfTransform::new(&sd, 0.1).unwrap();
        for &gamma in &[0.0, 0.02] {
            let (w0, step, count) = (-2.3, 0.0173, 300);
            let grid = tr.transform_grid(w0, step, count, gamma);
            for m in (0..count).step_by(13) {
                let z = Complex64::new(w0 + m as f64 * step, 0.5 * gamma);
                let (g, u) = tr.transform_pair(z);
                assert!((grid[m].0.value - g.value).norm() < 1e-11, "gamma={gamma} m={m}");
                assert!((grid[m].1.value - u.value).norm() < 1e-11, "gamma={gamma} m={m}");
            }
        }
    }
}
