use qdcav::config::{CutoffKind, ModelKind, ScenarioConfig, Temperatures};
use qdcav::presets::{preset, NAMES};
use qdcav::ConfigError;
use qdcav_core::spectral_density::{PhononModel, UvCutoff};

#[test]
fn empty_file_gives_defaults() {
    let cfg = ScenarioConfig::from_toml("").unwrap();
    assert_eq!(cfg, ScenarioConfig::default());
    assert_eq!(cfg.model.kind, ModelKind::Bulk);
    assert_eq!(cfg.params.polaron_gamma, 0.01);
    assert_eq!(cfg.model.to_model().unwrap(), PhononModel::bulk(2.0, 1.0));
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let err = ScenarioConfig::from_toml("[params]\ng = 0.1\ngama = 0.01\n").unwrap_err();
    let text = err.to_string();
    assert!(matches!(err, ConfigError::Parse(_)));
    assert!(text.contains("line 3") && text.contains("gama"), "{text}");
}

#[test]
fn type_errors_name_the_field() {
    let text = ScenarioConfig::from_toml("[grid]\npoints = \"many\"\n").unwrap_err().to_string();
    assert!(text.contains("line 2") && text.contains("points"), "{text}");
}

#[test]
fn temperature_accepts_scalar_or_list() {
    let one = ScenarioConfig::from_toml("[params]\ntemperature = 0.2\n").unwrap();
    assert_eq!(one.temperatures(), vec![0.2]);
    let many = ScenarioConfig::from_toml("[params]\ntemperature = [0.0, 0.05]\nemission_regularization = 1e-5\n").unwrap();
    assert_eq!(many.params.temperature, Temperatures::Many(vec![0.0, 0.05]));
    assert!(ScenarioConfig::from_toml("[params]\ntemperature = []\n").is_err());
    assert!(ScenarioConfig::from_toml("[params]\ntemperature = -1.0\n").is_err());
}

#[test]
fn semantic_checks() {
    let bad = [
        "[params]\ngamma = 0.01\n",
        "[params]\ndetuning = 0.1\n[outputs]\nemission = false\n",
        "[params]\ngamma_c = 0.01\ngamma_qd = 0.02\n[outputs]\nemission = false\n",
        "[model]\ndelta = -1.0\n",
        "[grid]\nmin = -1.0\n",
        "[oracle]\npoints = 0\n",
    ];
    for text in bad {
        assert!(ScenarioConfig::from_toml(text).is_err(), "{text}");
    }
    assert!(ScenarioConfig::from_toml("[params]\ngamma = 0.01\n[outputs]\nemission = false\n").is_ok());
}

#[test]
fn cutoff_selection() {
    let cfg = ScenarioConfig::from_toml("[model]\nkind = \"confined\"\nn = 3\nlinewidth = 0.06\ncutoff = \"hard\"\nomega_star = 40.0\n").unwrap();
    assert_eq!(cfg.model.cutoff, CutoffKind::Hard);
    match cfg.model.to_model().unwrap() {
        PhononModel::ConfinedMode { cutoff, .. } => assert_eq!(cutoff, UvCutoff::Hard { omega_star: 40.0 }),
        other => panic!("{other:?}"),
    }
    let star = ScenarioConfig::from_toml("[model]\nomega_star = 40.0\n").unwrap();
    assert_eq!(star.model.to_model().unwrap(), PhononModel::bulk(2.0, 1.0).with_cutoff(UvCutoff::PowerLaw { omega_star: 40.0 }));
}

#[test]
fn delta_lines() {
    let cfg = ScenarioConfig::from_toml("[model]\nkind = \"delta\"\nlines = [{ omega = 1.0, coupling = 0.5 }, { omega = 2.0, coupling = 0.1 }]\n").unwrap();
    match cfg.model.to_model().unwrap() {
        PhononModel::DeltaMode { lines } => assert_eq!(lines.len(), 2),
        other => panic!("{other:?}"),
    }
    let single = ScenarioConfig::from_toml("[model]\nkind = \"delta\"\ndelta = 1.0\n").unwrap();
    assert_eq!(single.model.to_model().unwrap(), PhononModel::delta_mode(1.0, 1.0));
}

#[test]
fn presets_round_trip_through_toml() {
    for name in NAMES {
        let cfg = preset(name).unwrap();
        cfg.check().unwrap();
        let back = ScenarioConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg, "{name}");
    }
    assert!(matches!(preset("fig3"), Err(ConfigError::UnknownPreset(_))));
}

#[test]
fn preset_parameters() {
    let f1 = preset("fig1").unwrap();
    assert_eq!(f1.model.to_model().unwrap(), PhononModel::bulk(2.0, 1.0));
    assert_eq!((f1.params.g, f1.params.gamma, f1.temperatures()), (0.05, 0.0, vec![0.1]));
    let f2 = preset("fig2_ohmic").unwrap();
    assert_eq!(f2.model.to_model().unwrap(), PhononModel::confined(1, 3.0, 1.0, 0.06));
    assert_eq!((f2.params.g, f2.params.gamma, f2.temperatures()), (3e-3, 1e-4, vec![0.0, 0.05]));
    let jc = preset("jc").unwrap();
    assert_eq!(jc.model.to_model().unwrap(), PhononModel::phonon_free());
}
