use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use qdcav_core::bath_correlation::{propagator_q, BathCorrelation, Which};
use qdcav_core::half_fourier::HalfTransform;
use qdcav_core::spectral_density::{DeltaLine, PhononModel, SpectralDensity};

const FOCK: usize = 64;

fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().column_sum().max();
    let squarings = (norm.max(1e-300).log2().ceil().max(0.0) as i32) + 4;
    let scaled = a / 2f64.powi(squarings);
    let n = a.nrows();
    let mut out = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        out += &term;
    }
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}

/// `exp(α(b† - b))` on a truncated Fock space.
fn displacement(alpha: f64) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(FOCK, FOCK);
    for n in 0..FOCK - 1 {
        let s = ((n + 1) as f64).sqrt();
        k[(n + 1, n)] = alpha * s;
        k[(n, n + 1)] = -alpha * s;
    }
    expm(&k)
}

/// `⟨D(a, t) D(b, 0)⟩` in the thermal state of one mode.
fn pair(omega: f64, temperature: f64, a: f64, b: f64, t: f64) -> C {
    let da = displacement(a);
    let db = displacement(b);
    let weights: Vec<f64> = (0..FOCK)
        .map(|n| if temperature > 0.0 { (-(n as f64) * omega / temperature).exp() } else if n == 0 { 1.0 } else { 0.0 })
        .collect();
    let z: f64 = weights.iter().sum();
    let mut acc = C::new(0.0, 0.0);
    for n in 0..40 {
        for m in 0..FOCK {
            let phase = C::new(0.0, (n as f64 - m as f64) * omega * t).exp();
            acc += weights[n] / z * phase * da[(n, m)] * db[(m, n)];
        }
    }
    acc
}

/// `(G_g, G_u)` built from products of displacement operators.
fn operator_greens(lines: &[DeltaLine], temperature: f64, t: f64) -> (C, C) {
    let mut pm = C::new(1.0, 0.0);
    let mut pp = C::new(1.0, 0.0);
    let mut mean = 1.0;
    for l in lines {
        let alpha = l.coupling / l.omega;
        pm *= pair(l.omega, temperature, alpha, -alpha, t);
        pp *= pair(l.omega, temperature, alpha, alpha, t);
        mean *= pair(l.omega, temperature, alpha, 0.0, 0.0).re;
    }
    // ξ_g = (B₊ + B₋)/2 - ⟨B⟩, ξ_u = (B₊ - B₋)/2i; ⟨B₋(t)B₊⟩ = ⟨B₊(t)B₋⟩ and
    // ⟨B₋(t)B₋⟩ = ⟨B₊(t)B₊⟩ by parity
    let gg = 0.5 * (pm + pp) - mean * mean;
    let gu = 0.5 * (pm - pp);
    (gg, gu)
}

fn line_sum(lines: &[(f64, f64)], t: f64) -> C {
    lines.iter().map(|&(nu, w)| w * C::new(0.0, -nu * t).exp()).sum()
}

#[test]
fn three_mode_lines_match_operator_algebra() {
    let lines = vec![
        DeltaLine { omega: 1.0, coupling: 0.5 },
        DeltaLine { omega: 1.7, coupling: 0.6 },
        DeltaLine { omega: 0.6, coupling: 0.25 },
    ];
    let sd = SpectralDensity::new(PhononModel::DeltaMode { lines: lines.clone() }).unwrap();
    for temperature in [0.0, 0.4] {
        let tr = HalfTransform::new(&sd, temperature).unwrap();
        let b = sd.mean_b(temperature).unwrap();
        assert!((tr.mean_b() - b).abs() < 1e-12);
        for t in [0.0, 0.37, 2.1, 9.4] {
            let (gg, gu) = operator_greens(&lines, temperature, t);
            let lg = line_sum(tr.lines(Which::Gg).unwrap(), t);
            let lu = line_sum(tr.lines(Which::Gu).unwrap(), t);
            assert!((gg - lg).norm() < 1e-8, "T={temperature} t={t}: {gg} vs {lg}");
            assert!((gu - lu).norm() < 1e-8, "T={temperature} t={t}: {gu} vs {lu}");
        }
    }
}

#[test]
fn delta_mode_propagator_is_periodic() {
    let sd = SpectralDensity::new(PhononModel::delta_mode(1.0, 1.0)).unwrap();
    let q = |t: f64| propagator_q(&sd, 0.0, t).unwrap();
    assert!(q(0.0).norm() < 1e-14);
    // Q(t) = S(1 - e^{-iω_b t}) at T = 0
    let half = q(core::f64::consts::PI);
    assert!((half - C::new(2.0, 0.0)).norm() < 1e-10, "{half}");
    let full = q(2.0 * core::f64::consts::PI);
    assert!(full.norm() < 1e-10);
}

#[test]
fn bulk_greens_at_origin() {
    let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
    let bath = BathCorrelation::new(&sd, 0.1).unwrap();
    let b2 = bath.mean_b().powi(2);
    assert!(bath.propagator_q(0.0).norm() < 1e-14);
    assert!((bath.green_g(0.0) - C::from(0.5 * (1.0 - b2) * (1.0 - b2))).norm() < 1e-12);
    assert!((bath.green_u(0.0) - C::from(0.5 * (1.0 - b2 * b2))).norm() < 1e-12);
}

#[test]
fn bulk_grid_shape() {
    let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
    let bath = BathCorrelation::new(&sd, 0.1).unwrap();
    // (2π/ω_max)/16 step bound
    assert!(bath.uniform_step() <= 2.0 * core::f64::consts::PI / 20.0 / 16.0);
    let t = bath.times();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(t[0], 0.0);
    assert!(bath.end_time() >= 1000.0);
    // superohmic long-time tail of G_u
    let late = bath.green_u(3000.0).norm();
    assert!(late < 1e-7, "{late}");
    let ratio = bath.green_u(1000.0).norm() / bath.green_u(2000.0).norm();
    assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
}

#[test]
fn ohmic_zero_temperature_channels_coincide() {
    let sd = SpectralDensity::new(PhononModel::ohmic(0.5, 1.0)).unwrap();
    let bath = BathCorrelation::new(&sd, 0.0).unwrap();
    assert_eq!(bath.mean_b(), 0.0);
    for (t, _, gg, gu) in bath.samples().step_by(97) {
        assert!((gg - gu).norm() < 1e-12, "t={t}");
    }
}

#[test]
fn interpolation_reproduces_nodes() {
    let sd = SpectralDensity::new(PhononModel::confined(3, 3.0, 1.0, 0.06)).unwrap();
    let bath = BathCorrelation::new(&sd, 0.05).unwrap();
    for (t, _, gg, gu) in bath.samples().step_by(311) {
        let (ig, _) = bath.interpolate(Which::Gg, t);
        let (iu, _) = bath.interpolate(Which::Gu, t);
        assert!((ig - gg).norm() < 1e-12 && (iu - gu).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn propagator_real_part_nonnegative(d in 0.2f64..3.0, t0 in 0.0f64..0.3, t in 0.0f64..200.0) {
        let sd = SpectralDensity::new(PhononModel::bulk(d, 1.0)).unwrap();
        let q = propagator_q(&sd, t0, t).unwrap();
        prop_assert!(q.re >= -1e-12);
    }

    #[test]
    fn propagator_initial_slope_is_polaron_shift(d in 0.2f64..3.0, t0 in 0.0f64..0.3) {
        let sd = SpectralDensity::new(PhononModel::bulk(d, 1.0)).unwrap();
        let h = 1e-5;
        let q = propagator_q(&sd, t0, h).unwrap();
        prop_assert!((q.im / h - d).abs() < 1e-3 * d);
    }
}
