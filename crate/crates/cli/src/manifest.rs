//! Run manifests: inputs, PRNG identity and a digest for every output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use screenpath::rng::PRNG_ID;

use crate::opts::Opts;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the resolved options without the output directory.
    pub config_digest: String,
    pub config: serde_json::Value,
    pub version: String,
    pub prng: String,
    pub seed: Option<u64>,
    pub wall_time_secs: f64,
    pub outputs: Vec<OutputDigest>,
    /// Command-specific notes, e.g. how each curve was sampled.
    pub details: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes outputs into one directory and records what was written.
pub struct OutputDir {
    dir: PathBuf,
    started: Instant,
    outputs: Vec<OutputDigest>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("{}: cannot create output directory", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("{}: cannot write", path.display()))?;
        self.outputs.push(OutputDigest {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn finish(self, command: &str, opts: &Opts, seed: Option<u64>, details: serde_json::Value) -> Result<PathBuf> {
        let mut config = serde_json::to_value(opts)?;
        if let Some(map) = config.as_object_mut() {
            map.remove("out");
        }
        let manifest = RunManifest {
            command: command.to_string(),
            config_digest: sha256_hex(&serde_json::to_vec(&config)?),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            prng: PRNG_ID.to_string(),
            seed,
            wall_time_secs: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            details,
        };
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&path, text).with_context(|| format!("{}: cannot write", path.display()))?;
        Ok(path)
    }
}
