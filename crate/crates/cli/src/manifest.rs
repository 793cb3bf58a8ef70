//! Run manifests: enough provenance to reproduce a report exactly —
//! effective settings, seeds, content hashes of every config involved.

use std::path::{Path, PathBuf};

use serde::Serialize;

use inar_core::formats::{sha256_hex, to_pretty, MANIFEST_SCHEMA};

use crate::error::CliError;
use crate::settings::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigRef {
    pub role: String,
    /// File path, or "embedded" for compiled-in reference defaults.
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub settings: Settings,
    pub workload_seed: u64,
    pub configs: Vec<ConfigRef>,
    pub bundle_hash: String,
    pub truth_hash: String,
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, settings: &Settings, workload_seed: u64) -> Self {
        Self {
            command: command.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            settings: settings.clone(),
            workload_seed,
            configs: Vec::new(),
            bundle_hash: String::new(),
            truth_hash: String::new(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Record a config that was read from a file (hash of the bytes) or
    /// compiled in (hash of its canonical serialization).
    pub fn record_config<T: Serialize>(
        &mut self,
        role: &str,
        path: Option<&Path>,
        embedded: &T,
    ) -> Result<String, CliError> {
        let (source, hash) = match path {
            Some(p) => {
                let bytes = std::fs::read(p)
                    .map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
                (p.display().to_string(), sha256_hex(&bytes))
            }
            None => {
                let canonical = serde_json::to_string(embedded)
                    .map_err(|e| CliError::validation(e.to_string()))?;
                ("embedded".to_string(), sha256_hex(canonical.as_bytes()))
            }
        };
        self.configs.push(ConfigRef { role: role.to_string(), source, sha256: hash.clone() });
        Ok(hash)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, to_pretty(MANIFEST_SCHEMA, self))
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

/// Default manifest path: next to the primary output.
pub fn default_manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}
