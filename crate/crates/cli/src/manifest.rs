use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the binary name, as given.
    pub args: Vec<String>,
    pub cwd: PathBuf,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Path -> sha256 of every input read.
    pub inputs: BTreeMap<String, String>,
    /// Path -> sha256 of every output written, manifest excluded.
    pub outputs: BTreeMap<String, String>,
    pub wall_time_ms: u64,
    pub version: String,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Collects what a command reads and writes.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
}

impl Artifacts {
    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn write(&mut self, p: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        fs::write(p, contents)?;
        self.outputs.push(p.to_path_buf());
        Ok(())
    }

    pub fn hashes(paths: &[PathBuf]) -> Result<BTreeMap<String, String>, CliError> {
        paths.iter().map(|p| Ok((p.display().to_string(), sha256_file(p)?))).collect()
    }
}

/// The manifest path for a primary output: `<out>.manifest.json`.
pub fn default_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn read(path: &Path) -> Result<RunManifest, CliError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))
}
