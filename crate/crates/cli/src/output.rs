//! Report files, atomic writes and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Writes report files into one directory, each through a temporary file
/// and a rename, and remembers what was written.
pub struct OutputDir {
    dir: PathBuf,
    format: Format,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, bytes).map_err(|e| CliError::data(format!("cannot write {}: {e}", tmp.display())))?;
        fs::rename(&tmp, &target).map_err(|e| CliError::data(format!("cannot write {}: {e}", target.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// Written only when the format includes CSV.
    pub fn csv(&mut self, name: &str, text: &str) -> Result<()> {
        if self.format.csv() {
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    /// Written only when the format includes JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.format.json() {
            self.write(name, &to_json(value)?)?;
        }
        Ok(())
    }

    /// Writes the manifest last so that it lists every other output.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = self.written.clone();
        manifest.outputs.sort();
        self.write("manifest.json", &to_json(&manifest)?)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn digest(role: &str, path: &Path) -> Result<InputDigest> {
    let bytes = fs::read(path).map_err(|e| {
        let msg = format!("cannot open {}: {e}", path.display());
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::usage(msg)
        } else {
            CliError::data(msg)
        }
    })?;
    Ok(InputDigest {
        role: role.to_string(),
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Everything needed to rerun a report: the arguments (minus the output
/// directory), the resolved configuration, input digests and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<C: Serialize>(
        subcommand: &str,
        args: &[String],
        config: &C,
        inputs: Vec<InputDigest>,
        seed: Option<u64>,
    ) -> Result<Self> {
        Ok(RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            args: args.to_vec(),
            config: serde_json::to_value(config)?,
            inputs,
            seed,
            outputs: Vec::new(),
        })
    }
}

/// Percent with one decimal, the table style of every CSV report.
pub fn pct(fraction: f64) -> String {
    format!("{:.1}", 100.0 * fraction)
}

pub fn opt_pct(fraction: Option<f64>) -> String {
    fraction.map(pct).unwrap_or_default()
}

/// Quotes a CSV field when needed.
pub fn field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}
