//! Result files and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mtmbsp::CredibleSummary64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::draws::DrawsFile;
use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to rerun a command, plus what it produced. The hash
/// covers the command, the configuration without file locations, and the
/// input digests; timings and output digests are excluded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub hash: String,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, InputRecord>,
    pub outputs: BTreeMap<String, String>,
    pub timings: BTreeMap<String, f64>,
    pub threads: usize,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, inputs: BTreeMap<String, InputRecord>) -> Self {
        let mut located = config.clone();
        located.x = None;
        located.y = None;
        located.schema = None;
        located.output = PathBuf::new();
        let digests: BTreeMap<&String, &String> = inputs.iter().map(|(k, v)| (k, &v.sha256)).collect();
        let canonical = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": located,
            "inputs": digests,
        });
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            hash: sha256_hex(canonical.to_string().as_bytes()),
            config: config.clone(),
            inputs,
            outputs: BTreeMap::new(),
            timings: BTreeMap::new(),
            threads: rayon::current_num_threads(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }
}

/// Collects result files and writes them, recording each digest.
pub struct Writer {
    dir: PathBuf,
    pub manifest: Manifest,
}

impl Writer {
    pub fn new(dir: &Path, manifest: Manifest) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), manifest })
    }

    pub fn file(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.manifest.outputs.insert(name.into(), sha256_hex(bytes));
        Ok(())
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(self.dir)
    }
}

/// `q025` for 0.025, `q50` for 0.5, `q975` for 0.975.
pub fn level_name(level: f64) -> String {
    let s = format!("{level}");
    let digits = s.strip_prefix("0.").unwrap_or(&s);
    format!("q{digits:0<2}")
}

/// Quantile table with 1-based `j`, `k`, headed by the manifest hash.
pub fn summary_csv(summary: &CredibleSummary64, lower: f64, upper: f64, manifest: &str) -> String {
    let mut out = format!("# manifest {manifest}\nj,k,{},q50,{}\n", level_name(lower), level_name(upper));
    for j in 0..summary.p() {
        for k in 0..summary.q() {
            let (l, m, u) = (summary.lower()[(j, k)], summary.median()[(j, k)], summary.upper()[(j, k)]);
            writeln!(out, "{},{},{l},{m},{u}", j + 1, k + 1).unwrap();
        }
    }
    out
}

/// Quantiles of a stored chain, padded with zeros to the full row count.
pub fn summarize_draws(file: &DrawsFile, lower: f64, upper: f64) -> Result<CredibleSummary64> {
    let s = file.samples.summary(lower, upper)?;
    let q = s.q();
    let mut out = [DMatrix::zeros(file.p_total, q), DMatrix::zeros(file.p_total, q), DMatrix::zeros(file.p_total, q)];
    for (row, &j) in file.rows.iter().enumerate() {
        for k in 0..q {
            out[0][(j, k)] = s.lower()[(row, k)];
            out[1][(j, k)] = s.median()[(row, k)];
            out[2][(j, k)] = s.upper()[(row, k)];
        }
    }
    let [l, m, u] = out;
    Ok(CredibleSummary64::new(l, m, u)?)
}
