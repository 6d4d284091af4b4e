//! Experiment directory manifest: content hashes and seeds that make every
//! artifact reproducible and let commands detect stale inputs.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

pub const MANIFEST_NAME: &str = "manifest.json";
/// Name of the scenario config copied into every experiment directory.
pub const CONFIG_NAME: &str = "config.toml";

/// Provenance of one trained model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    /// Content hash of the model file as it was written.
    pub sha256: String,
    /// Content hash of the scenario config the model was trained against.
    pub config_sha256: String,
    pub k: usize,
    pub hidden: usize,
    /// Prediction window length in samples.
    pub window: usize,
    pub train_seed: u64,
}

/// Ledger of everything an experiment directory contains. Maps are ordered
/// so the serialized form is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Algorithm used for every hash in this file.
    pub hash_algorithm: String,
    /// Hash of the scenario config the directory was collected under.
    pub config_sha256: Option<String>,
    /// Master seed per command invocation, keyed by command (and label).
    pub seeds: BTreeMap<String, u64>,
    /// Trained models by file name.
    pub models: BTreeMap<String, ModelEntry>,
    /// Every other artifact, keyed by path relative to the directory.
    pub files: BTreeMap<String, String>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            hash_algorithm: "sha256".into(),
            config_sha256: None,
            seeds: BTreeMap::new(),
            models: BTreeMap::new(),
            files: BTreeMap::new(),
        }
    }
}

impl Manifest {
    pub fn path_in(dir: &Path) -> std::path::PathBuf {
        dir.join(MANIFEST_NAME)
    }

    /// Load the manifest of `dir`, or a fresh one if none exists yet.
    pub fn load_or_new(dir: &Path) -> Result<Self> {
        let path = Self::path_in(dir);
        if !path.exists() {
            return Ok(Manifest::default());
        }
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Load the manifest of `dir`, failing if there is none.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = Self::path_in(dir);
        anyhow::ensure!(
            path.exists(),
            "no manifest in {}: run collect first",
            dir.display()
        );
        Self::load_or_new(dir)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = Self::path_in(dir);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Hash `dir/rel` and record it under `rel`.
    pub fn record_file(&mut self, dir: &Path, rel: &str) -> Result<()> {
        let hash = sha256_file(&dir.join(rel))?;
        self.files.insert(rel.to_string(), hash);
        Ok(())
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex(&h.finalize())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        std::fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(sha256_bytes(&bytes))
}

fn hex(digest: &[u8]) -> String {
    use std::fmt::Write;
    let mut s = String::with_capacity(digest.len() * 2);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}
