use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::OutputArgs;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to reproduce a run. Contains no timestamps so identical
/// runs produce identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub command: String,
    pub version: &'static str,
    pub config: C,
    pub threads: usize,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
}

pub fn digest(path: &Path) -> std::io::Result<InputDigest> {
    Ok(InputDigest {
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(fs::read(path)?)),
    })
}

impl<C: Serialize> RunManifest<C> {
    /// Writes next to the result file, to `--manifest`, or to the error stream.
    pub fn emit(&self, output: &OutputArgs) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::from)?;
        text.push('\n');
        let target = output.manifest.clone().or_else(|| {
            output.out.as_ref().map(|out| {
                let mut name = out.as_os_str().to_owned();
                name.push(".manifest.json");
                PathBuf::from(name)
            })
        });
        match target {
            Some(path) => fs::write(path, text),
            None => std::io::stderr().lock().write_all(text.as_bytes()),
        }
    }
}
