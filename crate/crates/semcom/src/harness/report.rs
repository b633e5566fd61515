//! CSV emission and run reports.
//!
//! CSV cells format floats with Rust's shortest round-trip representation,
//! so files are byte-identical across reruns and reparse exactly.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Writes a CSV with a fixed header; rows are pre-formatted cells.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for row in rows {
        body.push_str(&row.join(","));
        body.push('\n');
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Shortest round-trip formatting for a float cell.
pub fn fmt(value: f64) -> String {
    format!("{value}")
}

/// SHA-256 hex digest of a serializable config, used as the content hash in
/// run reports.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let body = serde_json::to_string(value).expect("config serializes");
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Summary of one experiment run: the config echo/hash, emitted files, and
/// experiment-specific summary statistics.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub csv_files: Vec<String>,
    pub summary: serde_json::Value,
}

impl RunReport {
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join(format!("report_{}.json", self.experiment));
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}
