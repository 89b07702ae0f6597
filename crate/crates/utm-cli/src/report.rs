//! Human-readable summary of a run from its manifest.

use std::path::Path;

use crate::artifacts::Manifest;
use crate::CliError;

pub fn emit_report(manifest_path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| {
        CliError::Config(format!(
            "missing artifact {}: {e}",
            manifest_path.display()
        ))
    })?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad manifest: {e}")))?;
    let mut out = String::new();
    out.push_str(&format!(
        "run report: scenario {}, seed {}\n",
        manifest.scenario, manifest.seed
    ));
    out.push_str(&format!(
        "status: {}\n\n",
        if manifest.pass { "PASS" } else { "FAIL" }
    ));
    if manifest.summary.is_empty() {
        out.push_str("no summary values\n");
    } else {
        out.push_str("summary\n");
        for (key, value) in &manifest.summary {
            out.push_str(&format!("  {key:<28} {value:.6e}\n"));
        }
    }
    if !manifest.files.is_empty() {
        out.push_str("\nartifacts\n");
        for (name, entry) in &manifest.files {
            out.push_str(&format!(
                "  {name:<36} {:>10} bytes  sha256 {}\n",
                entry.bytes,
                &entry.sha256[..16]
            ));
        }
    }
    // per-resolution residual tables for the audit scenarios
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    for table in ["residual.csv", "discrepancy.csv", "maxima.csv"] {
        if manifest.files.contains_key(table) {
            if let Ok(body) = std::fs::read_to_string(dir.join(table)) {
                out.push_str(&format!("\n{table}\n"));
                for line in body.lines() {
                    out.push_str(&format!("  {line}\n"));
                }
            }
        }
    }
    Ok(out)
}
