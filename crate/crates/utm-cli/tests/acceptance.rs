//! Determinism of the built-in selftest sweep: running it twice with the same
//! seed must produce byte-identical manifests, including every per-scenario
//! manifest hash and the combined hash printed at the end.

use assert_cmd::Command;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion:02} {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {criterion} failed: {detail}");
}

fn run_selftest(out: &std::path::Path, seed: u64) -> (String, String) {
    let assert = Command::cargo_bin("utm")
        .expect("binary builds")
        .env("UTM_WORKERS", "2")
        .arg("selftest")
        .arg("--out")
        .arg(out)
        .arg("--seed")
        .arg(seed.to_string())
        .assert()
        .success();
    let stdout = String::from_utf8(assert.get_output().stdout.clone()).unwrap();
    let manifest = std::fs::read(out.join("selftest.json")).unwrap();
    let mut hasher = Sha256::new();
    hasher.update(&manifest);
    let combined = stdout
        .lines()
        .find_map(|line| line.split("combined manifest sha256 ").nth(1))
        .expect("selftest prints the combined hash")
        .to_string();
    (format!("{:x}", hasher.finalize()), combined)
}

#[test]
fn criterion_11_selftest_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (hash_a, combined_a) = run_selftest(&dir.path().join("first"), 11);
    let (hash_b, combined_b) = run_selftest(&dir.path().join("second"), 11);
    report(
        11,
        hash_a == hash_b && combined_a == combined_b && combined_a.starts_with(&hash_a),
        &format!("selftest manifest sha256 {} twice", &hash_a[..16]),
    );
}
