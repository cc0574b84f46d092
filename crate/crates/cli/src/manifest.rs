//! Run manifest written next to the outputs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub tool_version: String,
    pub core_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_algorithm: Option<String>,
    /// SHA-256 of the effective configuration as written to `config.toml`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    /// Command-line options that shaped the run.
    pub options: BTreeMap<String, String>,
    /// Input file name -> SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output file name -> SHA-256.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: hpcqed::VERSION.to_string(),
            seed: None,
            noise_algorithm: None,
            config_sha256: None,
            options: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl ToString) {
        self.options.insert(key.to_string(), value.to_string());
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        let name = path.file_name().map_or_else(
            || path.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        self.inputs.insert(name, sha256(bytes));
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}

pub fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
