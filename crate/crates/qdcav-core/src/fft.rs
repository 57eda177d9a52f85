//! In-place iterative radix-2 FFT.

use core::f64::consts::PI;

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

/// Forward transform `X_k = Σ_j x_j e^{-2πi jk/N}`; `data.len()` must be a
/// power of two.
pub fn fft(data: &mut [Complex64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    // one twiddle table at full length, computed directly to keep the
    // error flat for long transforms
    let half_n = n / 2;
    let tw: Vec<Complex64> = (0..half_n)
        .map(|k| {
            let a = -2.0 * PI * k as f64 / n as f64;
            Complex64::new(a.cos(), a.sin())
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let v = data[start + k + half] * tw[k * stride];
                let u = data[start + k];
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Inverse of [`fft`], including the `1/N` factor.
pub fn ifft(data: &mut [Complex64]) {
    for v in data.iter_mut() {
        *v = v.conj();
    }
    fft(data);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v = v.conj() * scale;
    }
}

/// Bluestein evaluation of `X_m = Σ_{k<len} x_k e^{i(ω0 + m s) k h}` for
/// `m < count`, reusable across sequences of the same length.
#[derive(Debug, Clone)]
pub struct ChirpPlan {
    len: usize,
    count: usize,
    size: usize,
    pre: Vec<Complex64>,
    post: Vec<Complex64>,
    kernel: Vec<Complex64>,
}

fn chirp(theta: f64, j: usize) -> Complex64 {
    let j = j as f64;
    let a = 0.5 * theta * j * j;
    Complex64::new(a.cos(), a.sin())
}

impl ChirpPlan {
    pub fn new(len: usize, omega0: f64, h: f64, step: f64, count: usize) -> Self {
        let theta = step * h;
        let size = (len + count).next_power_of_two();
        let pre = (0..len)
            .map(|k| {
                let a = omega0 * h * k as f64;
                Complex64::new(a.cos(), a.sin()) * chirp(theta, k)
            })
            .collect();
        let post = (0..count).map(|m| chirp(theta, m)).collect();
        let mut kernel = alloc::vec![Complex64::new(0.0, 0.0); size];
        for m in 0..count {
            kernel[m] = chirp(theta, m).conj();
        }
        for k in 1..len {
            kernel[size - k] = chirp(theta, k).conj();
        }
        fft(&mut kernel);
        ChirpPlan { len, count, size, pre, post, kernel }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.len);
        let mut buf = alloc::vec![Complex64::new(0.0, 0.0); self.size];
        for (b, (v, p)) in buf.iter_mut().zip(x.iter().zip(&self.pre)) {
            *b = v * p;
        }
        fft(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel) {
            *b *= k;
        }
        ifft(&mut buf);
        buf.truncate(self.count);
        for (b, p) in buf.iter_mut().zip(&self.post) {
            *b *= p;
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn matches_direct_dft() {
        let n = 64;
        let x: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos()))
            .collect();
        let mut y = x.clone();
        fft(&mut y);
        for k in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, v) in x.iter().enumerate() {
                let a = -2.0 * PI * (j * k) as f64 / n as f64;
                s += v * Complex64::new(a.cos(), a.sin());
            }
            assert!((s - y[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn chirp_plan_matches_direct_sum() {
        let len = 300;
        let x: Vec<Complex64> = (0..len)
            .map(|j| Complex64::new((j as f64 * 0.21).cos(), (j as f64 * 0.05).sin()) / (1.0 + j as f64))
            .collect();
        let (w0, h, s, count) = (-1.3, 0.02, 0.0071, 37);
        let plan = ChirpPlan::new(len, w0, h, s, count);
        let got = plan.apply(&x);
        for (m, g) in got.iter().enumerate() {
            let w = w0 + m as f64 * s;
            let want: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::new(0.0, w * h * k as f64).exp())
                .sum();
            assert!((g - want).norm() < 1e-13, "m={m}");
        }
    }
}
