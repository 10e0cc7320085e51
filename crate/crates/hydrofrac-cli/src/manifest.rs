//! Run manifests: the fully resolved configuration, tool version, and
//! output list, written before the computation starts.
//!
//! The manifest is the reproducibility contract: feeding its `config.*`
//! entries back through the config builder yields the identical simulation,
//! and `hydrofrac verify` re-runs it and byte-compares the outputs. Output
//! files are additionally paired with a `checksums.sha256` digest file
//! written after the run.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::config::{ConfigBuilder, ResolvedConfig};
use crate::error::{CliError, Result};

pub const MANIFEST_NAME: &str = "manifest.txt";
pub const CHECKSUMS_NAME: &str = "checksums.sha256";

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub tool: String,
    pub timestamp_unix: u64,
    pub command: String,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    /// Output file names, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn for_simulation(cfg: &ResolvedConfig, outputs: Vec<String>) -> RunManifest {
        RunManifest {
            tool: format!("hydrofrac {}", env!("CARGO_PKG_VERSION")),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            command: "simulate".to_string(),
            seed: cfg.sim.seed,
            config: cfg
                .entries()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            outputs,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# hydrofrac run manifest\n");
        out.push_str(&format!("tool = {}\n", self.tool));
        out.push_str(&format!("timestamp_unix = {}\n", self.timestamp_unix));
        out.push_str(&format!("command = {}\n", self.command));
        out.push_str(&format!("seed = {}\n", self.seed));
        for (k, v) in &self.config {
            out.push_str(&format!("config.{k} = {v}\n"));
        }
        for o in &self.outputs {
            out.push_str(&format!("output = {o}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        RunManifest::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<RunManifest> {
        let mut m = RunManifest {
            tool: String::new(),
            timestamp_unix: 0,
            command: String::new(),
            seed: 0,
            config: Vec::new(),
            outputs: Vec::new(),
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}:{}: expected `key = value`, got `{line}`",
                    lineno + 1
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if let Some(cfg_key) = key.strip_prefix("config.") {
                m.config.push((cfg_key.to_string(), value.to_string()));
            } else {
                match key {
                    "tool" => m.tool = value.to_string(),
                    "timestamp_unix" => {
                        m.timestamp_unix = value.parse().map_err(|_| {
                            CliError::Usage(format!("{origin}: bad timestamp `{value}`"))
                        })?;
                    }
                    "command" => m.command = value.to_string(),
                    "seed" => {
                        m.seed = value.parse().map_err(|_| {
                            CliError::Usage(format!("{origin}: bad seed `{value}`"))
                        })?;
                    }
                    "output" => m.outputs.push(value.to_string()),
                    other => {
                        return Err(CliError::Usage(format!(
                            "{origin}: unknown manifest key `{other}`"
                        )));
                    }
                }
            }
        }
        if m.command.is_empty() {
            return Err(CliError::Usage(format!("{origin}: missing `command`")));
        }
        Ok(m)
    }

    /// Rebuilds the resolved configuration from the `config.*` echo.
    pub fn resolved_config(&self) -> Result<ResolvedConfig> {
        let mut b = ConfigBuilder::new();
        for (k, v) in &self.config {
            b.set(k, v.clone());
        }
        b.build()
    }
}

/// Writes `checksums.sha256` (sha256sum format) for the named files in
/// `dir`.
pub fn write_checksums(dir: &Path, files: &[String]) -> Result<()> {
    let mut out = String::new();
    for name in files {
        let path = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        out.push_str(&format!("{hex}  {name}\n"));
    }
    let path = dir.join(CHECKSUMS_NAME);
    std::fs::write(&path, out).map_err(|e| CliError::io(&path, e))
}
