//! One JSON line per run: what ran, with which settings, on which files.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct RunManifest<'a, C: Serialize> {
    pub subcommand: &'a str,
    pub config: &'a C,
    pub tool_version: &'static str,
    pub wall_time_secs: f64,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// SHA-256 of the dataset file read or written, if any.
    pub dataset_sha256: Option<String>,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Appends to `dest`, or writes to stderr when no destination is set.
pub fn emit<C: Serialize>(m: &RunManifest<C>, dest: Option<&PathBuf>) -> io::Result<()> {
    let line = serde_json::to_string(m).map_err(io::Error::other)?;
    match dest {
        Some(path) => {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            writeln!(f, "{line}")
        }
        None => writeln!(io::stderr(), "manifest: {line}"),
    }
}
