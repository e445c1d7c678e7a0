//! Trajectory experiment: single stochastic run or ensemble means.

use caslab_core::dynamics::{run_ensemble, run_trajectory, TrajectoryConfig, TrajectoryRecord};
use caslab_core::io::{csv_to_string, Cell};
use caslab_core::stats;
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::TrajectoryParams;
use crate::error::CliError;

pub fn run(params: &TrajectoryParams, seed: u64) -> Result<ExperimentOutput, CliError> {
    let config = TrajectoryConfig {
        hamiltonian: params.hamiltonian.build()?,
        dt: params.dt,
        steps: params.steps,
        site_measure: params.measurement.build()?,
        decoherence: params.decoherence.build()?,
        mode: params.mode,
        initial_state: params.initial_state.clone(),
        seed,
    };

    let mut files = Vec::new();
    let summary;
    if params.trajectories == 1 {
        let record = run_trajectory(&config).map_err(CliError::from_runtime_err)?;
        files.push(record_csv("trajectory.csv", &record)?);
        files.push(json_file("trajectory.json", &record)?);
        summary = summarize_single(&record);
    } else {
        let records =
            run_ensemble(&config, params.trajectories).map_err(CliError::from_runtime_err)?;
        files.push(ensemble_csv(&records)?);
        files.push(json_file("first_trajectory.json", &records[0])?);
        summary = summarize_ensemble(&records);
    }
    files.push(json_file("summary.json", &summary)?);
    Ok(ExperimentOutput { files, summary })
}

fn record_csv(name: &str, record: &TrajectoryRecord<f64>) -> Result<OutputFile, CliError> {
    let mut header = vec!["time", "survival", "entropy"];
    if record.purity.is_some() {
        header.push("purity");
    }
    let rows: Vec<Vec<Cell>> = (0..record.times.len())
        .map(|k| {
            let mut row = vec![
                Cell::float(record.times[k]),
                Cell::float(record.survival[k]),
                Cell::float(record.half_chain_entropy[k]),
            ];
            if let Some(p) = &record.purity {
                row.push(Cell::float(p[k]));
            }
            row
        })
        .collect();
    let csv = csv_to_string(&header, &rows).map_err(CliError::from_runtime_err)?;
    Ok(OutputFile {
        name: name.to_string(),
        content: FileContent::Csv(csv),
    })
}

fn ensemble_csv(records: &[TrajectoryRecord<f64>]) -> Result<OutputFile, CliError> {
    let n_points = records[0].times.len();
    let mut rows = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let survivals: Vec<f64> = records.iter().map(|r| r.survival[k]).collect();
        let entropies: Vec<f64> = records.iter().map(|r| r.half_chain_entropy[k]).collect();
        rows.push(vec![
            Cell::float(records[0].times[k]),
            Cell::float(stats::mean(&survivals)),
            Cell::float(stats::sem(&survivals)),
            Cell::float(stats::mean(&entropies)),
            Cell::float(stats::sem(&entropies)),
        ]);
    }
    let csv = csv_to_string(
        &["time", "mean_survival", "sem_survival", "mean_entropy", "sem_entropy"],
        &rows,
    )
    .map_err(CliError::from_runtime_err)?;
    Ok(OutputFile {
        name: "ensemble.csv".into(),
        content: FileContent::Csv(csv),
    })
}

fn late_mean(series: &[f64]) -> f64 {
    stats::mean(&series[series.len() / 2..])
}

fn summarize_single(record: &TrajectoryRecord<f64>) -> serde_json::Value {
    json!({
        "trajectories": 1,
        "steps": record.times.len() - 1,
        "final_survival": record.survival.last().copied().unwrap_or(1.0),
        "late_survival": late_mean(&record.survival),
        "late_entropy": late_mean(&record.half_chain_entropy),
        "n_measurements": record.outcomes.len(),
    })
}

fn summarize_ensemble(records: &[TrajectoryRecord<f64>]) -> serde_json::Value {
    let late_survivals: Vec<f64> = records.iter().map(|r| late_mean(&r.survival)).collect();
    let late_entropies: Vec<f64> =
        records.iter().map(|r| late_mean(&r.half_chain_entropy)).collect();
    json!({
        "trajectories": records.len(),
        "steps": records[0].times.len() - 1,
        "late_survival": stats::mean(&late_survivals),
        "sem_survival": stats::sem(&late_survivals),
        "late_entropy": stats::mean(&late_entropies),
        "sem_entropy": stats::sem(&late_entropies),
    })
}
