//! End-to-end checks of the `utm` binary: argument and config handling, exit
//! codes, artifact layout, and the report command. Every run here uses a tiny
//! grid so the whole file stays fast.

use assert_cmd::Command;
use predicates::prelude::*;
use tempfile::TempDir;

fn utm() -> Command {
    let mut cmd = Command::cargo_bin("utm").expect("binary builds");
    cmd.env("UTM_WORKERS", "2");
    cmd
}

/// A minimal forced-linear config on a 16 x 17 x 5 grid.
fn tiny_config(out: &std::path::Path, extra: &str) -> String {
    format!(
        r#"
scenario = "linear_manufactured"
output = "{}"
seed = 3

[problem]
gamma = -1.0
s = 1.2
t_horizon = 0.25

[grid]
n1 = 16
n2 = 17
nt = 5
l1 = 20.0
l2 = 20.0

[data]
profile = "gaussian"
velocity = [0.0, -2.0]
{extra}
"#,
        out.display()
    )
}

#[test]
fn malformed_toml_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "scenario = [unclosed").unwrap();
    utm()
        .arg("run")
        .arg(&cfg)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("error:"));
    // nothing else appeared next to the config
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn missing_config_file_exits_2() {
    utm()
        .arg("run")
        .arg("/nonexistent/run.toml")
        .assert()
        .code(2)
        .stderr(predicate::str::contains("cannot read config"));
}

#[test]
fn unknown_profile_exits_2_without_partial_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.toml");
    let text = tiny_config(&out, "").replace("\"gaussian\"", "\"sawtooth\"");
    std::fs::write(&cfg, text).unwrap();
    utm()
        .arg("run")
        .arg(&cfg)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("sawtooth"));
    assert!(!out.exists(), "failed validation must not create outputs");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, tiny_config(&out, "wavelength = 2.0\n")).unwrap();
    utm().arg("run").arg(&cfg).assert().code(2);
}

#[test]
fn zero_data_run_passes_and_reports() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.toml");
    let text = tiny_config(&out, "").replace("\"gaussian\"", "\"zero\"");
    std::fs::write(&cfg, text).unwrap();

    // zero data, zero forcing: the computed and exact solutions both vanish,
    // so the run passes with zero error
    utm()
        .arg("run")
        .arg(&cfg)
        .assert()
        .success()
        .stdout(predicate::str::contains("PASS"));
    let manifest = out.join("manifest.json");
    assert!(manifest.exists());
    for name in ["solution_u.bin", "config.echo.toml", "error_vs_t.csv"] {
        assert!(out.join(name).exists(), "missing artifact {name}");
    }

    utm()
        .arg("report")
        .arg(&manifest)
        .assert()
        .success()
        .stdout(
            predicate::str::contains("scenario linear_manufactured")
                .and(predicate::str::contains("status: PASS"))
                .and(predicate::str::contains("rel_l2")),
        );
}

#[test]
fn report_on_missing_manifest_exits_2() {
    utm()
        .arg("report")
        .arg("/nonexistent/manifest.json")
        .assert()
        .code(2)
        .stderr(predicate::str::contains("missing artifact"));
}

#[test]
fn failed_audit_exits_4_but_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.toml");
    let text = tiny_config(
        &out,
        "\n[audit]\nsamples = 8\ntolerance = 1e-30\nrefine = false\n",
    )
    .replace("linear_manufactured", "global_relation_audit");
    std::fs::write(&cfg, text).unwrap();
    utm()
        .arg("run")
        .arg(&cfg)
        .assert()
        .code(4)
        .stdout(predicate::str::contains("FAIL"));
    // a threshold failure is still a completed run with inspectable outputs
    assert!(out.join("manifest.json").exists());
    assert!(out.join("residual.csv").exists());
}
