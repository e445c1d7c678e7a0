//! Run manifests: config hash, version, seed, timing, and the output-file
//! inventory used for resume detection and integrity checks.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the canonical configuration JSON.
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    /// Unix epoch seconds; excluded from the byte-identical output contract.
    pub started_at: f64,
    pub finished_at: f64,
    pub outputs: Vec<OutputEntry>,
    /// Echo of the resolved parameter block.
    pub params: serde_json::Value,
}

pub fn now_epoch() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Canonical hash of a config value: serialized with sorted object keys.
pub fn config_hash(config: &serde_json::Value) -> String {
    let canonical = canonicalize(config);
    let text = serde_json::to_string(&canonical).unwrap_or_default();
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn canonicalize(v: &serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(map) => {
            let mut sorted: Vec<(&String, &serde_json::Value)> = map.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(b.0));
            let mut out = serde_json::Map::new();
            for (k, val) in sorted {
                out.insert(k.clone(), canonicalize(val));
            }
            serde_json::Value::Object(out)
        }
        serde_json::Value::Array(items) => {
            serde_json::Value::Array(items.iter().map(canonicalize).collect())
        }
        other => other.clone(),
    }
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::runtime(format!("manifest serialization failed: {e}")))?;
        crate::runner::write_atomic(&dir.join(MANIFEST_NAME), text.as_bytes())
    }

    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(dir.join(MANIFEST_NAME))
            .map_err(|e| CliError::runtime(format!("cannot read manifest: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::runtime(format!("corrupt manifest: {e}")))
    }

    /// True when every recorded output exists with the recorded byte length.
    pub fn validate_against(&self, dir: &Path) -> bool {
        self.outputs.iter().all(|entry| {
            std::fs::metadata(dir.join(&entry.path))
                .map(|m| m.len() == entry.bytes)
                .unwrap_or(false)
        })
    }
}
