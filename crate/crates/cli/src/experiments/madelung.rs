//! Madelung decomposition experiment: hydrodynamic fields on a grid plus
//! the optional ħ-scaling scan.

use caslab_core::io::{csv_to_string, Cell};
use caslab_core::madelung::{
    classical_limit_scan, decompose, momentum_field, quantum_potential, GridWavefunction,
};
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::{MadelungParams, MadelungProfile};
use crate::error::CliError;

pub fn run(params: &MadelungParams, _seed: u64) -> Result<ExperimentOutput, CliError> {
    let psi = match params.profile {
        MadelungProfile::Gaussian { sigma, k0 } => GridWavefunction::gaussian(
            params.n_points,
            params.extent,
            sigma,
            k0,
            params.hbar,
            params.mass,
        ),
        MadelungProfile::OscillatorGround { omega } => GridWavefunction::oscillator_ground(
            params.n_points,
            params.extent,
            omega,
            params.hbar,
            params.mass,
        ),
        MadelungProfile::OscillatorExcited { omega } => {
            GridWavefunction::oscillator_first_excited(
                params.n_points,
                params.extent,
                omega,
                params.hbar,
                params.mass,
            )
        }
    }
    .map_err(CliError::from_config_err)?;

    let fields = decompose(&psi).map_err(CliError::from_runtime_err)?;
    let q = quantum_potential(&fields);
    let p = momentum_field(&fields);

    let rows: Vec<Vec<Cell>> = (0..fields.positions.len())
        .map(|j| {
            vec![
                Cell::float(fields.positions[j]),
                Cell::float(fields.r[j]),
                Cell::opt_float(fields.s[j]),
                Cell::opt_float(q[j]),
                Cell::opt_float(p[j]),
            ]
        })
        .collect();
    let csv = csv_to_string(&["x", "R", "S", "Q", "p"], &rows)
        .map_err(CliError::from_runtime_err)?;

    let max_abs_q = q
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));

    let mut files = vec![OutputFile {
        name: "fields.csv".into(),
        content: FileContent::Csv(csv),
    }];

    let mut scan_summary = serde_json::Value::Null;
    if let Some(hbars) = &params.hbar_scan {
        let scan = classical_limit_scan(&psi, hbars).map_err(CliError::from_runtime_err)?;
        let rows: Vec<Vec<Cell>> = scan
            .iter()
            .map(|pt| vec![Cell::float(pt.hbar), Cell::float(pt.max_abs_q)])
            .collect();
        let csv = csv_to_string(&["hbar", "max_abs_q"], &rows)
            .map_err(CliError::from_runtime_err)?;
        files.push(OutputFile {
            name: "hbar_scan.csv".into(),
            content: FileContent::Csv(csv),
        });
        scan_summary = serde_json::to_value(&scan)
            .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
    }

    let masked = q.iter().filter(|v| v.is_none()).count();
    let summary = json!({
        "n_points": params.n_points,
        "hbar": params.hbar,
        "mass": params.mass,
        "max_abs_q": max_abs_q,
        "masked_points": masked,
        "hbar_scan": scan_summary,
    });
    files.push(json_file("summary.json", &summary)?);
    Ok(ExperimentOutput { files, summary })
}
