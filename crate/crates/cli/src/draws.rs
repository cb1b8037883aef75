//! Draws file: `key value` text header lines closed by `end`, followed by
//! the little-endian f64 payload (B cell-major, then Sigma, then r). The
//! header records the payload length and its SHA-256.

use std::io::Write;
use std::path::Path;

use mtmbsp::{ChainConfig, PosteriorSamples64};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

const MAGIC: &str = "mtmbsp-draws 1";

/// Posterior draws of one chain plus the rows of the full design they cover.
#[derive(Clone, Debug, PartialEq)]
pub struct DrawsFile {
    pub samples: PosteriorSamples64,
    /// Original row index of each sampled row.
    pub rows: Vec<usize>,
    /// Row count of the full coefficient matrix.
    pub p_total: usize,
    pub manifest: String,
}

impl DrawsFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let s = &self.samples;
        let mut payload = Vec::with_capacity(8 * (s.b_draws().len() + s.r_draws().len()));
        let sigma = s.sigma_draws().unwrap_or(&[]);
        for v in s.b_draws().iter().chain(sigma).chain(s.r_draws()) {
            payload.extend_from_slice(&v.to_le_bytes());
        }
        let c = s.config();
        let rows = if self.rows.len() == self.p_total && self.rows.iter().enumerate().all(|(i, &j)| i == j) {
            "all".to_string()
        } else {
            join(&self.rows)
        };
        let mut out = Vec::new();
        writeln!(out, "{MAGIC}").unwrap();
        for (k, v) in [
            ("manifest", self.manifest.clone()),
            ("scalar", "f64".into()),
            ("p", s.p().to_string()),
            ("q", s.q().to_string()),
            ("draws", s.draws().to_string()),
            ("p-total", self.p_total.to_string()),
            ("rows", rows),
            ("iterations", c.iterations.to_string()),
            ("burn-in", c.burn_in.to_string()),
            ("thin", c.thin.to_string()),
            ("seed", c.seed.to_string()),
            ("sigma", u8::from(c.keep_sigma).to_string()),
            ("r-columns", join(s.r_columns())),
            ("payload-bytes", payload.len().to_string()),
            ("sha256", hex::encode(Sha256::digest(&payload))),
        ] {
            writeln!(out, "{k} {v}").unwrap();
        }
        writeln!(out, "end").unwrap();
        out.extend_from_slice(&payload);
        out
    }

    pub fn from_bytes(bytes: &[u8], origin: &str) -> Result<Self> {
        let bad = |m: String| CliError::validation(format!("{origin}: {m}"));
        let mut fields = std::collections::BTreeMap::new();
        let mut pos = 0;
        let mut first = true;
        loop {
            let rest = &bytes[pos..];
            let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
                return Err(CliError::Checksum(format!("{origin}: header is truncated")));
            };
            let line = std::str::from_utf8(&rest[..nl]).map_err(|_| bad("header is not text".into()))?;
            pos += nl + 1;
            if first {
                if line != MAGIC {
                    return Err(bad(format!("not a draws file (first line {line:?})")));
                }
                first = false;
                continue;
            }
            if line == "end" {
                break;
            }
            let (k, v) = line.split_once(' ').unwrap_or((line, ""));
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| bad(format!("header lacks {k}")));
        let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(format!("header field {k} is not a number"))) };
        let payload = &bytes[pos..];
        let declared = num("payload-bytes")?;
        if payload.len() != declared {
            return Err(CliError::Checksum(format!(
                "{origin}: payload is {} bytes but the header declares {declared}",
                payload.len()
            )));
        }
        let digest = hex::encode(Sha256::digest(payload));
        if digest != get("sha256")? {
            return Err(CliError::Checksum(format!("{origin}: payload SHA-256 does not match the header")));
        }
        if get("scalar")? != "f64" {
            return Err(bad("only f64 payloads are supported".into()));
        }
        let (p, q, draws, p_total) = (num("p")?, num("q")?, num("draws")?, num("p-total")?);
        let rows = match get("rows")?.as_str() {
            "all" => (0..p_total).collect(),
            s => split(s).map_err(bad)?,
        };
        let r_columns = split(&get("r-columns")?).map_err(bad)?;
        let config = ChainConfig {
            iterations: num("iterations")?,
            burn_in: num("burn-in")?,
            thin: num("thin")?,
            seed: get("seed")?.parse().map_err(|_| bad("seed is not a number".into()))?,
            keep_sigma: get("sigma")? == "1",
        };
        let values: Vec<f64> =
            payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
        let nb = p * q * draws;
        let ns = if config.keep_sigma { q * q * draws } else { 0 };
        if values.len() != nb + ns + r_columns.len() * draws || rows.len() != p {
            return Err(bad("payload size does not match the header dimensions".into()));
        }
        let b = values[..nb].to_vec();
        let sigma = config.keep_sigma.then(|| values[nb..nb + ns].to_vec());
        let r = values[nb + ns..].to_vec();
        let samples = PosteriorSamples64::from_parts(p, q, draws, b, sigma, r_columns, r, config)
            .map_err(|e| bad(e.to_string()))?;
        Ok(Self { samples, rows, p_total, manifest: get("manifest")? })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes, &path.display().to_string())
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn split(s: &str) -> std::result::Result<Vec<usize>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.parse().map_err(|_| format!("bad index list {s:?}"))).collect()
}
