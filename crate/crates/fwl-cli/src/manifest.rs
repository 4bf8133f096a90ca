//! Run manifests: the command, the fully resolved config, the group hash,
//! the code version, and a content digest for every output file, so a run
//! can be re-executed and checked for byte-identical CSV/JSON outputs.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OutputRecord {
    /// path relative to the run's output directory
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_hash: Option<String>,
    pub code_version: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        m.parameters.validate()?;
        Ok(m)
    }

    pub fn write(&self, out_dir: &Path) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(out_dir.join(MANIFEST_FILE), bytes)?;
        Ok(())
    }
}
