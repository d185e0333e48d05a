//! `manifest.toml`, written next to every run's outputs.

use std::path::Path;

use serde::Serialize;

use crate::{CliError, CliResult, VERSION_STAMP};

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub version: &'static str,
    pub rng: &'static str,
    pub command: &'a str,
    pub config_path: Option<String>,
    pub output_dir: String,
    pub seed: u64,
    pub workers: Option<usize>,
    pub files: Vec<String>,
    /// The effective configuration after defaults and flag overrides.
    pub config: &'a C,
}

impl<'a, C: Serialize> RunManifest<'a, C> {
    pub fn new(command: &'a str, config_path: Option<&Path>, output_dir: &Path, seed: u64, config: &'a C) -> Self {
        Self {
            version: VERSION_STAMP,
            rng: sparsir_core::rng::RNG_ALGORITHM,
            command,
            config_path: config_path.map(|p| p.display().to_string()),
            output_dir: output_dir.display().to_string(),
            seed,
            workers: None,
            files: Vec::new(),
            config,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let text = toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize manifest: {e}")))?;
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| CliError::io(path, e))
    }
}
