//! Run manifest: written into the output directory before any results, so a
//! run can always be traced back to the exact resolved configuration.

use crate::error::CliError;
use crate::schema::Resolved;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub created_utc: String,
    pub config_path: String,
    /// SHA-256 of the raw config text; stable across platforms.
    pub config_sha256: String,
    pub seed_override: Option<u64>,
    pub master_seed: u64,
    /// Defaults-filled config; reparsing it reproduces the identical run.
    pub resolved_config_toml: String,
    pub outputs: Vec<String>,
}

pub fn config_hash(config_text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config_text.as_bytes());
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(
        command: &str,
        config_path: &Path,
        config_text: &str,
        seed_override: Option<u64>,
        resolved: &Resolved,
        outputs: &[&Path],
    ) -> Result<Self, CliError> {
        Ok(Self {
            command: command.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            config_path: config_path.display().to_string(),
            config_sha256: config_hash(config_text),
            seed_override,
            master_seed: resolved.file.master_seed,
            resolved_config_toml: resolved.to_toml()?,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Runtime(format!("manifest serialization failed: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }
}
