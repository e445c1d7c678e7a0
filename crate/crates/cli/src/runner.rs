//! Execute one run configuration: dispatch the experiment, write data files
//! atomically, and finish with a manifest.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{run_experiment, ExperimentOutput};
use crate::manifest::{config_hash, now_epoch, OutputEntry, RunManifest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format {other:?} (expected csv|json|both)")),
        }
    }
}

/// Write via a temporary name in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .ok_or_else(|| CliError::runtime("output path has no parent directory"))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string())
    ));
    std::fs::write(&tmp, bytes)
        .map_err(|e| CliError::runtime(format!("write {} failed: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::runtime(format!("rename to {} failed: {e}", path.display())))?;
    Ok(())
}

pub struct RunResult {
    pub dir: PathBuf,
    pub summary: serde_json::Value,
    pub written: Vec<String>,
}

/// Run a validated config into `dir`. `seed_override` (from `--seed`) takes
/// precedence over the config's seed. The manifest lands last so its
/// presence marks a complete run.
pub fn run_into(
    config: &ExperimentConfig,
    dir: &Path,
    seed_override: Option<u64>,
    format: OutputFormat,
) -> Result<RunResult, CliError> {
    let base_seed = seed_override.unwrap_or(config.seed);
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;

    let started_at = now_epoch();
    let mut all_written = Vec::new();
    let mut last_summary = serde_json::Value::Null;

    for rep in 0..config.repeat {
        let seed = if config.repeat == 1 {
            base_seed
        } else {
            caslab_core::random::derive_seed(base_seed, rep as u64)
        };
        let subdir = if config.repeat == 1 {
            dir.to_path_buf()
        } else {
            let d = dir.join(format!("rep_{rep:03}"));
            std::fs::create_dir_all(&d)
                .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", d.display())))?;
            d
        };
        let output = run_experiment(config, seed)?;
        let written = write_outputs(&output, &subdir, format)?;
        let entries: Vec<OutputEntry> = written
            .iter()
            .map(|name| {
                let bytes = std::fs::metadata(subdir.join(name))
                    .map(|m| m.len())
                    .unwrap_or(0);
                OutputEntry {
                    path: name.clone(),
                    bytes,
                }
            })
            .collect();
        let manifest = RunManifest {
            config_hash: config_hash(
                &serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            ),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_at,
            finished_at: now_epoch(),
            outputs: entries,
            params: config.params.clone(),
        };
        manifest.write(&subdir)?;
        for name in written {
            let rel = if config.repeat == 1 {
                name
            } else {
                format!("rep_{rep:03}/{name}")
            };
            all_written.push(rel);
        }
        last_summary = output.summary;
    }

    Ok(RunResult {
        dir: dir.to_path_buf(),
        summary: last_summary,
        written: all_written,
    })
}

fn write_outputs(
    output: &ExperimentOutput,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    for file in &output.files {
        let keep = match format {
            OutputFormat::Both => true,
            // summary.json always ships; format filters the data outputs.
            OutputFormat::Csv => file.content.is_csv() || file.name == "summary.json",
            OutputFormat::Json => !file.content.is_csv(),
        };
        if !keep {
            continue;
        }
        write_atomic(&dir.join(&file.name), file.content.bytes())?;
        written.push(file.name.clone());
    }
    Ok(written)
}
