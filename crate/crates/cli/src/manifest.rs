//! Reproducibility manifest written next to every run's artifacts.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonicalized effective config (keys sorted), so the
    /// hash is stable under reordering of the config document.
    pub config_hash: String,
    pub seed: u64,
    pub artifact_paths: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_time_seconds: f64,
}

/// Canonical config hash: serialize to JSON with sorted keys, hash the bytes.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    // serde_json maps are BTree-backed, so object keys come out sorted
    let value = serde_json::to_value(cfg)?;
    let canonical = serde_json::to_string(&value)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub struct ManifestBuilder {
    command: String,
    started: Instant,
    seed: u64,
    hash: String,
}

impl ManifestBuilder {
    pub fn start(command: &str, cfg: &RunConfig) -> Result<Self> {
        Ok(ManifestBuilder {
            command: command.to_string(),
            started: Instant::now(),
            seed: cfg.seed,
            hash: config_hash(cfg)?,
        })
    }

    pub fn finish(self, artifact_paths: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            command: self.command,
            config_hash: self.hash,
            seed: self.seed,
            artifact_paths,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}
