//! Batch front-end for the nanolander simulations.
//!
//! Each scenario reads a TOML config, runs one simulation and writes CSV/JSON
//! artifacts plus a `manifest.json` into an output directory.

pub mod config;
mod run;

use std::path::{Path, PathBuf};
use std::time::Instant;

use nanolander_core::evolve::EvolveError;
use nanolander_core::mobility::MobilityError;
use nanolander_core::shape_gravity::GravityError;
use nanolander_core::swarm_coverage::SwarmError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{parse_config, parse_config_str, ScenarioConfig, ScenarioKind, ScenarioParams};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("gravity: {0}")]
    Gravity(#[from] GravityError),
    #[error("mobility: {0}")]
    Mobility(#[from] MobilityError),
    #[error("swarm: {0}")]
    Swarm(#[from] SwarmError),
    #[error("evolve: {0}")]
    Evolve(#[from] EvolveError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: ScenarioKind,
    /// SHA-256 of the canonical, defaults-filled config.
    pub config_sha256: String,
    pub version: String,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Emitted files relative to the output directory, the manifest last.
    pub files: Vec<String>,
    /// False when the simulation hit its time or step limit.
    pub converged: bool,
}

pub fn config_hash(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(config.canonical().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the scenario and writes its artifacts and manifest into `out`,
/// creating the directory if needed.
pub fn run(config: &ScenarioConfig, out: &Path) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let started = Instant::now();
    log::info!(
        "running {} scenario into {}",
        config.kind.name(),
        out.display()
    );
    let artifacts = run::dispatch(config, out)?;
    let mut files = artifacts.files;
    files.push(MANIFEST_FILE.into());
    let manifest = RunManifest {
        kind: config.kind,
        config_sha256: config_hash(config),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed(),
        wall_time_s: started.elapsed().as_secs_f64(),
        files,
        converged: artifacts.converged,
    };
    let path = out.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })?;
    if !manifest.converged {
        log::warn!("{} scenario did not converge", config.kind.name());
    }
    Ok(manifest)
}
