//! File-based orchestration behind the `gazegen` binary: every subcommand
//! resolves its settings (flags over config file over defaults), runs the
//! corresponding library calls, and writes its outputs plus a provenance
//! record into the output directory.

pub mod args;
mod config;
mod evaluate;
mod generate;
mod hmm;
mod ingest;
mod kde;
mod sweep;
mod train;

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::io::atomic_write;
use crate::error::{Error, Result};

pub use args::{Cli, Command};

/// Command completed.
pub const EXIT_OK: i32 = 0;
/// Command failed.
pub const EXIT_ERROR: i32 = 1;
/// Sweep completed but one or more pairings failed (partial report).
pub const EXIT_PARTIAL: i32 = 2;

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Train(a) => train::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Hmm(a) => hmm::run(a),
        Command::Kde(a) => kde::run(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub(crate) fn default_out() -> PathBuf {
    PathBuf::from("gazegen-out")
}

/// Hash of the resolved configuration, recorded in every provenance block.
pub(crate) fn config_hash(config: &serde_json::Value) -> String {
    let canonical = config.to_string();
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(digest)
}

#[derive(Serialize)]
pub(crate) struct Provenance {
    pub command: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub outputs: Vec<String>,
}

pub(crate) fn provenance(
    command: &str,
    config: serde_json::Value,
    outputs: &[&str],
) -> Provenance {
    Provenance {
        command: command.to_string(),
        config_hash: config_hash(&config),
        config,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
    }
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Contract(format!("serialization failed: {e}")))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Write a payload under a content checksum so later loads can refuse
/// silently corrupted files.
pub(crate) fn write_checksummed(
    path: &Path,
    payload: serde_json::Value,
    prov: &Provenance,
) -> Result<()> {
    let checksum = hex::encode(Sha256::digest(payload.to_string().as_bytes()));
    let doc = serde_json::json!({
        "checksum": checksum,
        "model": payload,
        "provenance": serde_json::to_value(prov)
            .map_err(|e| Error::Contract(format!("provenance serialization: {e}")))?,
    });
    write_json(path, &doc)
}

/// Load a checksummed payload, verifying the stored digest.
pub(crate) fn read_checksummed(path: &Path) -> Result<serde_json::Value> {
    let path_str = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(&path_str, e))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parse(&path_str, e.line(), e.to_string()))?;
    let stored = doc
        .get("checksum")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Integrity(format!("{path_str}: missing checksum")))?;
    let payload = doc
        .get("model")
        .ok_or_else(|| Error::Integrity(format!("{path_str}: missing model body")))?;
    let actual = hex::encode(Sha256::digest(payload.to_string().as_bytes()));
    if stored != actual {
        return Err(Error::Integrity(format!(
            "{path_str}: checksum mismatch (stored {stored}, computed {actual})"
        )));
    }
    Ok(payload.clone())
}

pub(crate) fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))
}

/// Parse "lo..hi" as an inclusive range.
pub(crate) fn parse_range(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split("..").collect();
    if parts.len() == 2 {
        if let (Ok(lo), Ok(hi)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            if lo <= hi {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::Config(format!(
        "expected an inclusive range like 2..5, got '{s}'"
    )))
}

/// Shared timing switch: "real" measures wall clock, "none" writes zeros
/// so identical runs produce byte-identical outputs.
pub(crate) fn parse_timing(s: &str) -> Result<bool> {
    match s {
        "real" => Ok(true),
        "none" => Ok(false),
        other => Err(Error::Config(format!(
            "timing must be 'real' or 'none', got '{other}'"
        ))),
    }
}
