//! Scan checkpoints: a small JSON file holding the config fingerprint, how
//! many records have been emitted, and the running statistics, written
//! atomically after each emitted batch. An empty or missing file means a
//! fresh run; a fingerprint mismatch is refused.

use crate::records::ScanStatsPart;
use crate::CliError;
use anyhow::Context;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: String,
    pub config_hash: String,
    pub completed: u64,
    /// Set once the whole grid and the closing statistics record went out;
    /// resuming a finished checkpoint emits nothing further.
    #[serde(default)]
    pub finished: bool,
    pub stats: ScanStatsPart,
}

pub fn load(path: &Path) -> Result<Option<Checkpoint>, CliError> {
    let raw = match std::fs::read_to_string(path) {
        Ok(raw) => raw,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => {
            return Err(CliError::Internal(
                anyhow::Error::new(e).context(format!("reading checkpoint {}", path.display())),
            ))
        }
    };
    if raw.trim().is_empty() {
        return Ok(None);
    }
    serde_json::from_str(&raw)
        .map(Some)
        .map_err(|e| CliError::Input(format!("malformed checkpoint {}: {e}", path.display())))
}

pub fn save(path: &Path, cp: &Checkpoint) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let body = serde_json::to_string(cp).context("serializing checkpoint")?;
    std::fs::write(&tmp, body).with_context(|| format!("writing checkpoint {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("replacing checkpoint {}", path.display()))?;
    Ok(())
}
