//! Quadrature: adaptive Gauss–Kronrod for smooth real integrands and
//! Filon-type rules for `∫ p(t) e^{izt} dt` with `p` a cubic Hermite
//! interpolant.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::NumericalError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]` with optional interior
/// breakpoints. Converges when the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, NumericalError> {
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            intervals.push((w[0], w[1], v, e));
        }
    }
    for _ in 0..20_000 {
        let total: f64 = intervals.iter().map(|s| s.2).sum();
        let err: f64 = intervals.iter().map(|s| s.3).sum();
        if !total.is_finite() {
            return Err(NumericalError::NonFinite("adaptive quadrature"));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (k, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.3 > acc.1 { (i, s.3) } else { acc });
        let (a, b, _, _) = intervals.swap_remove(k);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Err(NumericalError::QuadratureStalled { at: m });
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        intervals.push((a, m, v1, e1));
        intervals.push((m, b, v2, e2));
    }
    Err(NumericalError::QuadratureStalled { at: f64::NAN })
}

/// Moments `M_k(θ) = ∫_0^1 x^k e^{iθx} dx` for `k < out.len()`.
pub fn moments(theta: Complex64, out: &mut [Complex64]) {
    let n = out.len();
    if theta.norm() < 2.0 {
        let it = Complex64::new(0.0, 1.0) * theta;
        for (k, m) in out.iter_mut().enumerate() {
            *m = Complex64::new(1.0 / (k as f64 + 1.0), 0.0);
        }
        let mut term = Complex64::new(1.0, 0.0);
        for j in 1..40 {
            term = term * it / j as f64;
            for (k, m) in out.iter_mut().enumerate() {
                *m += term / (k as f64 + j as f64 + 1.0);
            }
            if term.norm() < 1e-18 {
                break;
            }
        }
        return;
    }
    let it = Complex64::new(0.0, 1.0) * theta;
    let e = it.exp();
    let inv = it.inv();
    let mut prev = (e - 1.0) * inv;
    if n > 0 {
        out[0] = prev;
    }
    for k in 1..n {
        prev = (e - k as f64 * prev) * inv;
        out[k] = prev;
    }
}

/// Integrals of the cubic Hermite basis against `e^{iθx}` on `[0, 1]`:
/// `[H00, H10, H01, H11]` with `H10, H11` the derivative shapes.
pub fn hermite_weights(theta: Complex64) -> [Complex64; 4] {
    let mut m = [Complex64::new(0.0, 0.0); 4];
    moments(theta, &mut m);
    [
        m[0] - 3.0 * m[2] + 2.0 * m[3],
        m[1] - 2.0 * m[2] + m[3],
        3.0 * m[2] - 2.0 * m[3],
        m[3] - m[2],
    ]
}

/// `∫_a^{a+h} p(t) e^{izt} dt` where `p` is the cubic Hermite interpolant
/// with values `f0, f1` and derivatives `d0, d1` at the panel ends.
pub fn hermite_panel(
    z: Complex64,
    a: f64,
    h: f64,
    f0: Complex64,
    d0: Complex64,
    f1: Complex64,
    d1: Complex64,
) -> Complex64 {
    let w = hermite_weights(z * h);
    let phase = (Complex64::new(0.0, a) * z).exp();
    phase * h * (w[0] * f0 + w[1] * h * d0 + w[2] * f1 + w[3] * h * d1)
}

/// Like [`hermite_panel`] with an extra linear weight `c0 + c1 (t - a) / h`.
#[allow(clippy::too_many_arguments)]
pub fn hermite_panel_linear(
    z: Complex64,
    a: f64,
    h: f64,
    f0: Complex64,
    d0: Complex64,
    f1: Complex64,
    d1: Complex64,
    c0: Complex64,
    c1: Complex64,
) -> Complex64 {
    let p = [
        f0,
        h * d0,
        -3.0 * f0 - 2.0 * h * d0 + 3.0 * f1 - h * d1,
        2.0 * f0 + h * d0 - 2.0 * f1 + h * d1,
    ];
    let mut m = [Complex64::new(0.0, 0.0); 5];
    moments(z * h, &mut m);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        acc += p[k] * (c0 * m[k] + c1 * m[k + 1]);
    }
    (Complex64::new(0.0, a) * z).exp() * h * acc
}
