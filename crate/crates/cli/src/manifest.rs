//! Run manifests: the argv, seeds and input/output digests of a command,
//! written next to each output as `<output>.manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "mixgraph";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, verbatim.
    pub argv: Vec<String>,
    /// Working directory the relative paths in `argv` resolve against.
    pub cwd: PathBuf,
    pub seeds: Vec<u64>,
    /// Input path → SHA-256 hex digest.
    pub inputs: BTreeMap<String, String>,
    /// Output path → SHA-256 hex digest. Empty in the copy embedded in a report.
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String]) -> CliResult<Self> {
        let cwd = std::env::current_dir().map_err(|e| CliError::io(Path::new("."), e))?;
        Ok(Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv: argv.to_vec(),
            cwd,
            seeds: Vec::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds.push(seed);
        self
    }

    pub fn add_input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Records the digests of `outputs` and writes a sidecar manifest next to
    /// each of them.
    pub fn finish(mut self, outputs: &[&Path]) -> CliResult<()> {
        for path in outputs {
            self.outputs.insert(path.display().to_string(), sha256_file(path)?);
        }
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes") + "\n";
        for path in outputs {
            let side = sidecar_path(path);
            fs::write(&side, &text).map_err(|e| CliError::io(&side, e))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()))
    }

    /// Paths whose current digest differs from the recorded one.
    pub fn changed(recorded: &BTreeMap<String, String>) -> CliResult<Vec<String>> {
        let mut changed = Vec::new();
        for (path, digest) in recorded {
            if &sha256_file(Path::new(path))? != digest {
                changed.push(path.clone());
            }
        }
        Ok(changed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abc");
        fs::write(&path, "abc").unwrap();
        assert_eq!(sha256_file(&path).unwrap(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(sidecar_path(&path).file_name().unwrap(), "abc.manifest.json");
    }
}
