//! Competition experiments: single run, temperature sweep, N-scaling.

use caslab_core::competition::{
    n_scaling_curve, run_competition, temperature_sweep, CompetitionRecord, EventKind,
};
use caslab_core::io::{csv_to_string, Cell};
use caslab_core::CompetitionConfig64;
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::{NScalingParams, TemperatureSweepParams};
use crate::error::CliError;

pub fn run_single(params: &CompetitionConfig64, seed: u64) -> Result<ExperimentOutput, CliError> {
    let mut config = params.clone();
    config.seed = seed;
    let record = run_competition(&config).map_err(CliError::from_runtime_err)?;

    let mut files = vec![events_csv(&record, config.n_bases)?, json_file("record.json", &record)?];
    let summary = json!({
        "n_bases": config.n_bases,
        "event_rate": config.event_rate(),
        "winner": record.winner,
        "time_to_dominance": record.time_to_dominance,
        "duration": record.duration,
        "n_actualizations": record.n_actualizations,
        "n_erasures": record.n_erasures,
        "max_final_amplitude": record
            .final_amplitudes
            .iter()
            .cloned()
            .fold(0.0f64, f64::max),
        "max_stationary_mean": record
            .stationary_means
            .iter()
            .cloned()
            .fold(0.0f64, f64::max),
    });
    files.push(json_file("summary.json", &summary)?);
    Ok(ExperimentOutput { files, summary })
}

fn events_csv(record: &CompetitionRecord<f64>, n_bases: usize) -> Result<OutputFile, CliError> {
    let mut header: Vec<String> = vec!["time".into(), "event".into(), "basis".into()];
    for b in 0..n_bases {
        header.push(format!("amp_{b}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rows: Vec<Vec<Cell>> = record
        .events
        .iter()
        .map(|ev| {
            let mut row = vec![
                Cell::float(ev.time),
                Cell::Text(
                    match ev.kind {
                        EventKind::Actualization { .. } => "actualization",
                        EventKind::Erasure => "erasure",
                    }
                    .to_string(),
                ),
                match ev.kind {
                    EventKind::Actualization { basis } => Cell::Int(basis as i64),
                    EventKind::Erasure => Cell::Empty,
                },
            ];
            row.extend(ev.amplitudes_after.iter().map(|&a| Cell::float(a)));
            row
        })
        .collect();
    let csv = csv_to_string(&header_refs, &rows).map_err(CliError::from_runtime_err)?;
    Ok(OutputFile {
        name: "events.csv".into(),
        content: FileContent::Csv(csv),
    })
}

pub fn run_temperature_sweep(
    params: &TemperatureSweepParams,
    seed: u64,
) -> Result<ExperimentOutput, CliError> {
    let mut template = params.competition.clone();
    template.seed = seed;
    let sweep = temperature_sweep(&template, &params.temperatures, params.runs_per_point)
        .map_err(CliError::from_runtime_err)?;

    let rows: Vec<Vec<Cell>> = sweep
        .points
        .iter()
        .map(|p| {
            vec![
                Cell::float(p.temperature),
                Cell::float(p.dominance_probability),
                Cell::opt_float(p.mean_time_to_dominance),
            ]
        })
        .collect();
    let csv = csv_to_string(
        &["temperature", "dominance_probability", "mean_time_to_dominance"],
        &rows,
    )
    .map_err(CliError::from_runtime_err)?;

    let summary = json!({
        "runs_per_point": params.runs_per_point,
        "transition_estimate": sweep.transition_estimate,
        "spearman_rho": sweep.spearman_rho,
        "spearman_p_negative": sweep.spearman_p_negative,
        "dominance_at_lowest_t": sweep.points.first().map(|p| p.dominance_probability),
        "dominance_at_highest_t": sweep.points.last().map(|p| p.dominance_probability),
    });

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "temperature_sweep.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}

pub fn run_n_scaling(params: &NScalingParams, seed: u64) -> Result<ExperimentOutput, CliError> {
    let mut template = params.competition.clone();
    template.seed = seed;
    let curve = n_scaling_curve(&template, &params.n_values, params.runs_per_n)
        .map_err(CliError::from_runtime_err)?;

    let rows: Vec<Vec<Cell>> = curve
        .points
        .iter()
        .map(|p| {
            vec![
                Cell::Int(p.n_variables as i64),
                Cell::float(p.event_rate),
                Cell::float(p.mean_max_amplitude),
                Cell::float(p.sem),
            ]
        })
        .collect();
    let csv = csv_to_string(
        &["n_variables", "event_rate", "mean_max_amplitude", "sem"],
        &rows,
    )
    .map_err(CliError::from_runtime_err)?;

    let summary = match &curve.fit {
        Some(fit) => json!({
            "runs_per_n": params.runs_per_n,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "degenerate_fit": false,
        }),
        None => json!({
            "runs_per_n": params.runs_per_n,
            "degenerate_fit": true,
        }),
    };

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "n_scaling.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}
