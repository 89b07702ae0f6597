//! Output-directory bookkeeping: every artifact a scenario writes goes
//! through the store, which records a content hash and finally writes a
//! manifest listing each file. Identical runs produce byte-identical
//! manifests, so the manifest hash certifies reproducibility.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use utm_core::grid::GridField;
use utm_core::record::SolutionRecord;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    pub pass: bool,
    pub summary: BTreeMap<String, f64>,
    pub files: BTreeMap<String, FileEntry>,
}

pub struct ArtifactStore {
    root: PathBuf,
    files: BTreeMap<String, FileEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

impl ArtifactStore {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Config(format!("cannot create output directory: {e}")))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes)
            .map_err(|e| CliError::Solver(format!("writing {name}: {e}")))?;
        self.files.insert(
            name.to_string(),
            FileEntry {
                sha256: sha256_hex(bytes),
                bytes: bytes.len() as u64,
            },
        );
        Ok(())
    }

    pub fn write_string(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Solver(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write_string(name, &text)
    }

    /// Header + payload pair of the field's binary form, registered under
    /// `<prefix>.json` and `<prefix>.bin`.
    pub fn write_field_binary(&mut self, prefix: &str, field: &GridField) -> Result<(), CliError> {
        field
            .write_binary(self.root.join(prefix))
            .map_err(|e| CliError::Solver(format!("writing {prefix}: {e}")))?;
        for ext in ["json", "bin"] {
            let name = format!("{prefix}.{ext}");
            let bytes = std::fs::read(self.root.join(&name))
                .map_err(|e| CliError::Solver(format!("rereading {name}: {e}")))?;
            self.files.insert(
                name,
                FileEntry {
                    sha256: sha256_hex(&bytes),
                    bytes: bytes.len() as u64,
                },
            );
        }
        Ok(())
    }

    pub fn write_field_csv(&mut self, name: &str, field: &GridField) -> Result<(), CliError> {
        field
            .write_csv(self.root.join(name))
            .map_err(|e| CliError::Solver(format!("writing {name}: {e}")))?;
        let bytes = std::fs::read(self.root.join(name))
            .map_err(|e| CliError::Solver(format!("rereading {name}: {e}")))?;
        self.files.insert(
            name.to_string(),
            FileEntry {
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            },
        );
        Ok(())
    }

    /// Solution field, both boundary traces, and the diagnostics map with
    /// timing keys dropped (they would break run-to-run reproducibility).
    pub fn write_solution(
        &mut self,
        prefix: &str,
        record: &SolutionRecord,
    ) -> Result<(), CliError> {
        self.write_field_binary(&format!("{prefix}_u"), &record.u)?;
        self.write_field_csv(&format!("{prefix}_dirichlet_trace.csv"), &record.dirichlet_trace)?;
        self.write_field_csv(&format!("{prefix}_robin_trace.csv"), &record.robin_trace)?;
        let diagnostics: BTreeMap<&String, &f64> = record
            .diagnostics
            .iter()
            .filter(|(k, _)| !k.ends_with("_seconds"))
            .collect();
        self.write_json(&format!("{prefix}_diagnostics.json"), &diagnostics)
    }

    pub fn finish(
        self,
        scenario: &str,
        seed: u64,
        pass: bool,
        summary: BTreeMap<String, f64>,
    ) -> Result<Manifest, CliError> {
        let manifest = Manifest {
            scenario: scenario.to_string(),
            seed,
            pass,
            summary,
            files: self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Solver(format!("serializing manifest: {e}")))?;
        text.push('\n');
        std::fs::write(self.root.join("manifest.json"), text)
            .map_err(|e| CliError::Solver(format!("writing manifest: {e}")))?;
        Ok(manifest)
    }
}

pub fn csv_table(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
