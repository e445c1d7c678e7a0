//! One module per experiment kind; each returns its data files plus a flat
//! summary for the manifest and sweep aggregation.

mod chsh;
mod competition;
mod madelung;
mod patterns;
mod spacing;
mod trajectory;
mod weak;
mod zeno;

use serde_json::Value;

use crate::config::{ExperimentConfig, TypedParams};
use crate::error::CliError;

/// A single output file (name relative to the run directory).
pub struct OutputFile {
    pub name: String,
    pub content: FileContent,
}

pub enum FileContent {
    Csv(String),
    Json(String),
}

impl FileContent {
    pub fn bytes(&self) -> &[u8] {
        match self {
            FileContent::Csv(s) | FileContent::Json(s) => s.as_bytes(),
        }
    }

    pub fn is_csv(&self) -> bool {
        matches!(self, FileContent::Csv(_))
    }
}

pub struct ExperimentOutput {
    pub files: Vec<OutputFile>,
    /// Flat JSON object; numeric fields feed sweep aggregate tables.
    pub summary: Value,
}

pub fn json_file(name: &str, value: &impl serde::Serialize) -> Result<OutputFile, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(OutputFile {
        name: name.to_string(),
        content: FileContent::Json(text),
    })
}

/// Run the experiment described by `config` with an explicit seed (the
/// top-level seed, possibly overridden by `--seed` or repeat derivation).
pub fn run_experiment(
    config: &ExperimentConfig,
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    match config.typed_params()? {
        TypedParams::Zeno(p) => zeno::run(&p, seed),
        TypedParams::Trajectory(p) => trajectory::run(&p, seed),
        TypedParams::Competition(p) => competition::run_single(&p, seed),
        TypedParams::TemperatureSweep(p) => competition::run_temperature_sweep(&p, seed),
        TypedParams::NScaling(p) => competition::run_n_scaling(&p, seed),
        TypedParams::Spacing(p) => spacing::run(&p, seed),
        TypedParams::Weak(p) => weak::run(&p, seed),
        TypedParams::Chsh(p) => chsh::run(&p, seed),
        TypedParams::Patterns(p) => patterns::run(&p, seed),
        TypedParams::Madelung(p) => madelung::run(&p, seed),
    }
}
