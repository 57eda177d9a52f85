use std::path::Path;
use std::process::{Command, Output};

fn qdcav(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdcav")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn validate_prints_derived_scalars() {
    let dir = tempfile::tempdir().unwrap();
    let dump = qdcav(&["preset", "fig1", "--dump-config"], dir.path());
    assert!(dump.status.success());
    write(dir.path(), "fig1.toml", &String::from_utf8(dump.stdout).unwrap());
    let out = qdcav(&["validate", "fig1.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("<B>^2 = 0.32"), "{text}");
}

#[test]
fn validate_reports_divergent_ohmic_factor() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "o.toml", "[model]\nkind = \"ohmic\"\ndelta = 0.5\n[params]\ntemperature = 0.0\n");
    let out = qdcav(&["validate", "o.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("S = DIVERGENT") && text.contains("<B> = 0.000000"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "unknown.toml", "[params]\ngee = 1\n");
    assert_eq!(qdcav(&["run", "unknown.toml"], d).status.code(), Some(2));
    assert_eq!(qdcav(&["run", "missing.toml"], d).status.code(), Some(2));
    // g at the mode width
    write(d, "wide.toml", "[model]\nkind = \"confined\"\nn = 3\ndelta = 3.0\nlinewidth = 0.06\n[params]\ng = 0.06\n");
    let v = qdcav(&["validate", "wide.toml"], d);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8(v.stdout).unwrap().contains("validity violated"));
    assert_eq!(qdcav(&["run", "wide.toml"], d).status.code(), Some(4));
    // n = 2 confined modes are not supported
    write(d, "n2.toml", "[model]\nkind = \"confined\"\nn = 2\nlinewidth = 0.5\n");
    assert_eq!(qdcav(&["run", "n2.toml"], d).status.code(), Some(2));
    // exact and analytic sidebands disagree for a strongly coupled mode
    write(d, "delta.toml", "[model]\nkind = \"delta\"\ndelta = 1.0\n[params]\ng = 0.01\ngamma = 1e-4\ntemperature = 0.0\n[outputs]\nemission = false\n");
    let o = qdcav(&["oracle", "delta.toml"], d);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS exact zero-phonon positions"), "{text}");
}

#[test]
fn preset_run_writes_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdcav(&["preset", "jc", "--out", "here", "-q"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("here/absorption.csv").exists());
    assert!(dir.path().join("here/manifest.json").exists());
}

#[test]
fn oracle_passes_for_phonon_free_config() {
    let dir = tempfile::tempdir().unwrap();
    let dump = qdcav(&["preset", "jc", "--dump-config"], dir.path());
    write(dir.path(), "jc.toml", &String::from_utf8(dump.stdout).unwrap());
    let out = qdcav(&["oracle", "jc.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
