//! Zeno experiment: Rabi qubit under `k` equally spaced projective
//! measurements of its initial state.

use caslab_core::dynamics::zeno_survival_curve;
use caslab_core::hamiltonians::{sigma_x, SpinChainHamiltonian};
use caslab_core::io::{csv_to_string, Cell};
use caslab_core::quantum::StateVector;
use num_complex::Complex;
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::ZenoParams;
use crate::error::CliError;

pub fn run(params: &ZenoParams, _seed: u64) -> Result<ExperimentOutput, CliError> {
    let h = SpinChainHamiltonian::custom(sigma_x::<f64>() * Complex::new(params.omega / 2.0, 0.0), 1)
        .map_err(CliError::from_config_err)?;
    let psi0 = StateVector::<f64>::qubit_bits(&[0]).map_err(CliError::from_config_err)?;
    let curve = zeno_survival_curve(&h, &psi0, params.t_total, params.measurements)
        .map_err(CliError::from_runtime_err)?;

    let rows: Vec<Vec<Cell>> = curve
        .iter()
        .enumerate()
        .map(|(j, &(t, s))| vec![Cell::Int(j as i64), Cell::float(t), Cell::float(s)])
        .collect();
    let csv = csv_to_string(&["measurement", "time", "survival"], &rows)
        .map_err(CliError::from_runtime_err)?;

    let final_survival = curve.last().map(|&(_, s)| s).unwrap_or(1.0);
    let summary = json!({
        "omega": params.omega,
        "t_total": params.t_total,
        "measurements": params.measurements,
        "final_survival": final_survival,
        "deficit": 1.0 - final_survival,
    });

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "zeno.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}
