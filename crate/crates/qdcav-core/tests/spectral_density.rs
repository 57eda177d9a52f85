use proptest::prelude::*;
use qdcav_core::spectral_density::{HuangRhys, PhononModel, SpectralDensity, UvCutoff};

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..panels {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `∫_0^∞ f`, with `ω = 1/x` on the tail beyond 1.
fn simpson_half_line<F: Fn(f64) -> f64>(f: F, panels: usize) -> f64 {
    let tail = |x: f64| {
        let x = x.max(1e-12);
        f(1.0 / x) / (x * x)
    };
    simpson(&f, 0.0, 1.0, panels) + simpson(tail, 0.0, 1.0, panels)
}

#[test]
fn ohmic_value_at_cutoff() {
    let sd = SpectralDensity::new(PhononModel::ohmic(1.0, 1.0)).unwrap();
    assert!((sd.eval_j(1.0) - (-1.0f64).exp()).abs() < 1e-14);
    assert_eq!(sd.eval_j(-0.3), 0.0);
    assert_eq!(sd.eval_j(0.0), 0.0);
}

#[test]
fn confined_shape_at_band_centre() {
    // (ω+1)² = 4 and (ω-1)² + J̃²/4 = 1 at ω = ω_b = 1 with J̃ = 2
    let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
    let c = sd.normalization().unwrap();
    assert!((sd.eval_j(1.0) - c / 4.0).abs() < 1e-12 * c);
}

#[test]
fn bulk_polaron_shift_closes_on_independent_quadrature() {
    let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
    let c = sd.normalization().unwrap();
    let shape = |w: f64| w * w / ((w + 1.0) * (w + 1.0) * ((w - 1.0) * (w - 1.0) + 1.0));
    let integral = simpson_half_line(shape, 200_000);
    assert!((c * integral - 2.0).abs() < 1e-6, "{}", c * integral);
    let direct = simpson_half_line(|w| if w > 0.0 { sd.eval_j(w) / w } else { 0.0 }, 200_000);
    assert!((direct - sd.polaron_shift()).abs() < 1e-6 * sd.polaron_shift());
}

#[test]
fn bulk_reference_oscillator_strength() {
    let sd = SpectralDensity::new(PhononModel::bulk(2.0, 1.0)).unwrap();
    let b = sd.mean_b(0.1).unwrap();
    assert!((b * b - 0.325).abs() < 0.01, "B² = {}", b * b);
    assert!((b - 0.570).abs() < 0.01);
    let wide = SpectralDensity::new(PhononModel::bulk(2.0, 1.0).with_cutoff(UvCutoff::PowerLaw { omega_star: 40.0 }))
        .unwrap()
        .mean_b(0.1)
        .unwrap();
    assert!((wide * wide - b * b).abs() < 0.005);
}

#[test]
fn huang_rhys_matches_independent_quadrature() {
    let sd = SpectralDensity::new(PhononModel::confined(3, 3.0, 1.0, 0.06)).unwrap();
    for t in [0.0, 0.05, 0.3] {
        let want = simpson_half_line(
            |w| {
                if w <= 0.0 {
                    return 0.0;
                }
                let coth = if t == 0.0 { 1.0 } else { 1.0 / (w / (2.0 * t)).tanh() };
                sd.eval_j(w) / (w * w) * coth
            },
            400_000,
        );
        let got = sd.huang_rhys(t).unwrap().value().unwrap();
        assert!((got - want).abs() < 1e-5 * want, "T={t}: {got} vs {want}");
    }
}

#[test]
fn delta_mode_huang_rhys() {
    for (d, wb) in [(1.0, 1.0), (0.3, 0.5), (2.0, 4.0)] {
        let sd = SpectralDensity::new(PhononModel::delta_mode(d, wb)).unwrap();
        let s = sd.huang_rhys(0.0).unwrap().value().unwrap();
        assert!((s - d / wb).abs() < 1e-14);
        assert!((sd.polaron_shift() - d).abs() < 1e-14);
        let b = sd.mean_b(0.0).unwrap();
        assert!((b - (-0.5 * s).exp()).abs() < 1e-14);
    }
}

#[test]
fn ohmic_zero_temperature_has_no_huang_rhys_factor() {
    let sd = SpectralDensity::new(PhononModel::ohmic(0.5, 1.0)).unwrap();
    assert_eq!(sd.huang_rhys(0.0).unwrap(), HuangRhys::Divergent);
    assert_eq!(sd.mean_b(0.0).unwrap(), 0.0);
}

#[test]
fn phonon_free_is_trivial() {
    let sd = SpectralDensity::new(PhononModel::phonon_free()).unwrap();
    assert!(sd.is_phonon_free());
    assert_eq!(sd.eval_j(1.0), 0.0);
    assert_eq!(sd.mean_b(0.2).unwrap(), 1.0);
}

#[test]
fn rejects_nonphysical_models() {
    assert!(SpectralDensity::new(PhononModel::ohmic(-1.0, 1.0)).is_err());
    assert!(SpectralDensity::new(PhononModel::confined(3, 2.0, 0.0, 0.1)).is_err());
    assert!(SpectralDensity::new(PhononModel::confined(3, 2.0, 1.0, -0.1)).is_err());
    assert!(SpectralDensity::new(PhononModel::confined(0, 2.0, 1.0, 0.1)).is_err());
    assert!(SpectralDensity::new(PhononModel::ohmic(f64::NAN, 1.0)).is_err());
    let tail = PhononModel::confined(4, 1.0, 1.0, 0.1).with_cutoff(UvCutoff::PowerLaw { omega_star: 20.0 });
    assert!(SpectralDensity::new(tail).is_err());
}

fn confined_models() -> impl Strategy<Value = PhononModel> {
    (prop_oneof![Just(1u32), 3u32..=5], 0.05f64..5.0, 0.2f64..3.0, 0.02f64..2.0)
        .prop_map(|(n, d, wb, jw)| PhononModel::confined(n, d, wb, jw * wb))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalization_closure(model in confined_models()) {
        let sd = SpectralDensity::new(model.clone()).unwrap();
        let delta = match model { PhononModel::ConfinedMode { delta, .. } => delta, _ => unreachable!() };
        prop_assert!((sd.polaron_shift() - delta).abs() < 1e-6 * delta);
    }

    #[test]
    fn small_frequency_power_law(model in confined_models()) {
        let sd = SpectralDensity::new(model.clone()).unwrap();
        let n = model.exponent().unwrap() as i32;
        let wb = model.omega_b();
        let a = sd.eval_j(1e-3 * wb) / (1e-3 * wb).powi(n);
        let b = sd.eval_j(1e-4 * wb) / (1e-4 * wb).powi(n);
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!((a / b - 1.0).abs() < 0.05);
    }

    #[test]
    fn density_is_nonnegative(model in confined_models(), x in 0.0f64..60.0) {
        let sd = SpectralDensity::new(model).unwrap();
        prop_assert!(sd.eval_j(x) >= 0.0);
    }

    #[test]
    fn huang_rhys_grows_with_temperature(model in confined_models(), t in 0.0f64..0.5) {
        prop_assume!(model.exponent() != Some(1));
        let sd = SpectralDensity::new(model.clone()).unwrap();
        let lo = sd.huang_rhys(t).unwrap().value().unwrap();
        let hi = sd.huang_rhys(t + 0.05).unwrap().value().unwrap();
        prop_assert!(hi >= lo);
    }

    #[test]
    fn mean_b_falls_with_coupling(d in 0.05f64..3.0, t in 0.0f64..0.3) {
        let lo = SpectralDensity::new(PhononModel::bulk(d, 1.0)).unwrap().mean_b(t).unwrap();
        let hi = SpectralDensity::new(PhononModel::bulk(1.5 * d, 1.0)).unwrap().mean_b(t).unwrap();
        prop_assert!(hi < lo);
        prop_assert!(lo > 0.0 && lo <= 1.0);
    }
}
