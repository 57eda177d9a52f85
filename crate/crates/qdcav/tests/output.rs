use qdcav::config::ScenarioConfig;
use qdcav::output::{parse_spectrum_csv, spectrum_csv, CSV_HEADER};
use qdcav::presets::preset;
use qdcav::run_scenario;
use qdcav_core::spectra::{FrequencyGrid, SpectrumEngine, SystemParams};
use qdcav_core::spectral_density::PhononModel;

fn jc_engine() -> SpectrumEngine {
    SpectrumEngine::new(PhononModel::phonon_free(), SystemParams::new(0.05, 0.005, 0.0)).unwrap()
}

#[test]
fn csv_round_trips_exactly() {
    let s = jc_engine().absorption(&FrequencyGrid::uniform(-0.2, 0.2, 401));
    let text = spectrum_csv(&s, &[("g", "0.05".into())]);
    assert!(text.lines().any(|l| l == CSV_HEADER));
    let parsed = parse_spectrum_csv(&text).unwrap();
    assert_eq!(parsed.rows.len(), 401);
    assert!(parsed.meta.iter().any(|(k, v)| k == "g" && v == "0.05"));
    for ((w, v, kind), (a, b)) in parsed.rows.iter().zip(s.omega.iter().zip(&s.intensity)) {
        assert_eq!(w.to_bits(), a.to_bits());
        assert_eq!(v.to_bits(), b.to_bits());
        assert_eq!(kind, "absorption");
    }
}

#[test]
fn csv_parser_rejects_garbage() {
    assert!(parse_spectrum_csv("# a = b\n").is_err());
    assert!(parse_spectrum_csv("omega,intensity,kind\n1.0,x,absorption\n").is_err());
    assert!(parse_spectrum_csv("w,i\n").is_err());
}

#[test]
fn run_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = preset("jc").unwrap();
    let outcome = run_scenario(&cfg, dir.path(), true).unwrap();
    for name in ["absorption.csv", "polaron.csv", "resonance.json", "manifest.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), outcome.written.len());
    // the manifest carries the config needed to rerun
    let again = ScenarioConfig::from_toml(manifest["config"].as_str().unwrap()).unwrap();
    assert_eq!(again, cfg);
    let resonance: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("resonance.json")).unwrap()).unwrap();
    assert_eq!(resonance["vrs"], "underdamped");
    assert!((resonance["splitting"].as_f64().unwrap() - 0.1).abs() < 1e-10);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut cfg = ScenarioConfig::from_toml("[params]\ng = 0.05\ntemperature = 0.1\n[grid]\nmin = -0.2\nmax = 0.2\npoints = 201\n").unwrap();
    cfg.outputs.bath_debug = true;
    run_scenario(&cfg, a.path(), true).unwrap();
    run_scenario(&cfg, b.path(), true).unwrap();
    for name in ["absorption.csv", "emission.csv", "polaron.csv", "resonance.json", "bath.csv", "manifest.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn sweep_writes_one_directory_per_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::from_toml(
        "[model]\nkind = \"none\"\n[params]\ngamma = 0.01\ntemperature = [0.0, 0.05]\n[grid]\nmin = -0.1\nmax = 0.1\npoints = 11\n[outputs]\nemission = false\n",
    )
    .unwrap();
    run_scenario(&cfg, dir.path(), true).unwrap();
    assert!(dir.path().join("T0/absorption.csv").exists());
    assert!(dir.path().join("T0.05/absorption.csv").exists());
}
