//! Per-run manifest: resolved config, config hash, timestamps, artifacts.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use socsim_core::config::SimConfig;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArtifactPaths {
    pub events: String,
    pub rewards_csv: String,
    pub personas: String,
    pub ties_dir: String,
    pub final_matrix: String,
    pub checkpoint: String,
}

impl Default for ArtifactPaths {
    fn default() -> Self {
        ArtifactPaths {
            events: "events.jsonl".into(),
            rewards_csv: "rewards.csv".into(),
            personas: "personas.json".into(),
            ties_dir: "ties".into(),
            final_matrix: "tie_matrix_final.tsv".into(),
            checkpoint: "checkpoint.json".into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub run_id: String,
    pub config: SimConfig,
    /// Hex SHA-256 of the config file bytes.
    pub config_hash: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub artifacts: ArtifactPaths,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Deterministic run id from the resolved configuration (which includes the
/// seed): equal configs produce equal ids.
pub fn derive_run_id(config: &SimConfig) -> String {
    let canonical = serde_json::to_string(config).unwrap_or_default();
    format!("run-{}", &sha256_hex(canonical.as_bytes())[..12])
}

pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(run_id: String, config: SimConfig, config_hash: String) -> Self {
        RunManifest {
            schema_version: socsim_core::SCHEMA_VERSION.to_string(),
            run_id,
            config,
            config_hash,
            started_unix: now_unix(),
            finished_unix: None,
            artifacts: ArtifactPaths::default(),
        }
    }

    pub fn save(&self, run_dir: &Path) -> CliResult<()> {
        let path = run_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json)?;
        Ok(())
    }

    pub fn load(run_dir: &Path) -> CliResult<Self> {
        let path = run_dir.join("manifest.json");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::artifact(format!("cannot read {}: {e}", path.display())))?;
        let manifest: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::artifact(format!("{}: {e}", path.display())))?;
        if manifest.schema_version != socsim_core::SCHEMA_VERSION {
            return Err(CliError::artifact(format!(
                "{}: unsupported schema_version {}",
                path.display(),
                manifest.schema_version
            )));
        }
        Ok(manifest)
    }
}
