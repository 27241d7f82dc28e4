//! Output files: CSV encoding, the run manifest and all-or-nothing commits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Serializes `rows` as CSV with a header line. `None` cells stay empty.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| HarnessError::Config(format!("csv encoding: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Config(format!("csv encoding: {e}")))
}

/// `None` for `+∞`, so that infinite values are written as empty cells.
pub fn finite_or_empty(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Seeds used by one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSeed {
    pub trial: usize,
    pub label: String,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    /// SHA-256 of the canonical JSON of `config`.
    pub input_hash: String,
    pub wall_clock_seconds: f64,
    pub trial_seeds: Vec<TrialSeed>,
    pub outputs: Vec<String>,
    pub version: String,
}

/// Hex SHA-256 of the canonical JSON encoding of a resolved configuration.
pub fn input_hash(config: &ExperimentConfig) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Named output files held in memory until [`commit`] writes them.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.as_slice())
    }
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.partial"));
    fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        HarnessError::io(&target, e)
    })?;
    Ok(target)
}

/// Writes every file into `dir` through a temporary name and a rename. If
/// any write fails, the files already written by this call are removed.
pub fn commit(dir: &Path, outputs: &Outputs) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::new();
    for (name, bytes) in &outputs.files {
        match write_atomic(dir, name, bytes) {
            Ok(p) => written.push(p),
            Err(e) => {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: f64,
        b: Option<f64>,
    }

    #[test]
    fn infinity_becomes_an_empty_cell() {
        let rows = [
            Row {
                a: 1.5,
                b: finite_or_empty(f64::INFINITY),
            },
            Row {
                a: 2.0,
                b: Some(0.25),
            },
        ];
        let text = String::from_utf8(to_csv(&rows).unwrap()).unwrap();
        assert_eq!(text, "a,b\n1.5,\n2.0,0.25\n");
    }

    #[test]
    fn failed_commit_leaves_nothing_behind() {
        let dir = std::env::temp_dir().join(format!("decycle-commit-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let mut out = Outputs::default();
        out.add("first.csv", b"x\n1\n".to_vec());
        out.add("missing/second.csv", b"y\n".to_vec());
        assert!(commit(&dir, &out).is_err());
        assert!(!dir.join("first.csv").exists());
        let _ = fs::remove_dir_all(&dir);
    }
}
