//! Complex special functions: log-gamma, polygamma of orders 0 and 1, and
//! the generalized exponential integral `E_n`.

use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of `ln Γ(z)` (Lanczos, reflection for `Re z < 1/2`).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - (pi * z).sin().ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// Digamma `ψ(z)`.
pub fn digamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 && (z.im.abs() < 10.0) {
        // ψ(1-z) - π cot(πz)
        let pz = PI * z;
        return digamma(Complex64::new(1.0, 0.0) - z) - PI * pz.cos() / pz.sin();
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm_sqr() < 100.0 {
        acc -= z.inv();
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    let series = w2
        * (-1.0 / 12.0
            + w2 * (1.0 / 120.0
                + w2 * (-1.0 / 252.0
                    + w2 * (1.0 / 240.0
                        + w2 * (-1.0 / 132.0 + w2 * (691.0 / 32_760.0 + w2 * (-1.0 / 12.0)))))));
    acc + z.ln() - 0.5 * w + series
}

/// Trigamma `ψ'(z)`.
pub fn trigamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 && (z.im.abs() < 10.0) {
        // ψ'(1-z) + ψ'(z) = π² / sin²(πz)
        let s = (PI * z).sin();
        return PI * PI / (s * s) - trigamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.norm_sqr() < 100.0 {
        acc += (z * z).inv();
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    let series = w
        * w2
        * (1.0 / 6.0
            + w2 * (-1.0 / 30.0
                + w2 * (1.0 / 42.0
                    + w2 * (-1.0 / 30.0
                        + w2 * (5.0 / 66.0 + w2 * (-691.0 / 2_730.0 + w2 * (7.0 / 6.0)))))));
    acc + w + 0.5 * w2 + series
}

/// Generalized exponential integral `E_n(z) = ∫_1^∞ e^{-zs} s^{-n} ds` for
/// `Re z >= 0`.
pub fn expint_e(n: u32, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm() == 0.0 {
        return if n > 1 {
            Complex64::new(1.0 / (n as f64 - 1.0), 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    if n == 0 {
        return (-z).exp() / z;
    }
    let nf = n as f64;
    if z.norm() > 1.0 {
        // modified Lentz evaluation of the continued fraction
        let tiny = 1e-300;
        let mut b = z + nf;
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = b.inv();
        let mut h = d;
        for i in 1..100_000 {
            let an = -(i as f64) * (nf - 1.0 + i as f64);
            b += 2.0;
            d = (an * d + b).inv();
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - one).norm() < 1e-16 {
                break;
            }
        }
        return h * (-z).exp();
    }
    let mut ans = if n != 1 {
        Complex64::new(1.0 / (nf - 1.0), 0.0)
    } else {
        -z.ln() - EULER_GAMMA
    };
    let mut fact = one;
    for i in 1..200u32 {
        fact *= -z / i as f64;
        let del = if i != n - 1 {
            -fact / (i as f64 - nf + 1.0)
        } else {
            let mut psi = -EULER_GAMMA;
            for k in 1..n {
                psi += 1.0 / k as f64;
            }
            fact * (-z.ln() + psi)
        };
        ans += del;
        if del.norm() < ans.norm() * 1e-17 {
            break;
        }
    }
    ans
}
