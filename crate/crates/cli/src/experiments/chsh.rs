//! CHSH experiment: evaluate or optimize the Bell combination, optionally
//! sweeping the first measurement angle for plotting.

use caslab_core::io::{csv_to_string, Cell};
use caslab_core::patterns::{build_hybrid_state, chsh_optimize, chsh_value, ChshSettings};
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::ChshParams;
use crate::error::CliError;

pub fn run(params: &ChshParams, _seed: u64) -> Result<ExperimentOutput, CliError> {
    let state = build_hybrid_state(params.basis_kind, &params.form)
        .map_err(CliError::from_config_err)?;

    let (settings, s_at_settings, optimized) = if params.optimize {
        let (best, s_max) = chsh_optimize(&state);
        (best, s_max, true)
    } else {
        let settings = params.settings.expect("validated");
        let s = chsh_value(&state, &settings);
        (settings, s, false)
    };

    let mut rows: Vec<Vec<Cell>> = Vec::new();
    match params.sweep_points {
        None => rows.push(settings_row(&settings, s_at_settings)),
        Some(n) => {
            let pi = std::f64::consts::PI;
            for k in 0..n {
                let a = -pi + 2.0 * pi * k as f64 / n as f64;
                let varied = ChshSettings { a, ..settings };
                rows.push(settings_row(&varied, chsh_value(&state, &varied)));
            }
        }
    }
    let csv = csv_to_string(&["a", "a_prime", "b", "b_prime", "s"], &rows)
        .map_err(CliError::from_runtime_err)?;

    let summary = json!({
        "basis_kind": params.basis_kind,
        "optimized": optimized,
        "s": s_at_settings,
        "marginal_entropy": state.marginal_entropy(),
        "settings": settings,
        "tsirelson_bound": 2.0 * 2.0f64.sqrt(),
    });

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "chsh.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}

fn settings_row(settings: &ChshSettings<f64>, s: f64) -> Vec<Cell> {
    vec![
        Cell::float(settings.a),
        Cell::float(settings.a_prime),
        Cell::float(settings.b),
        Cell::float(settings.b_prime),
        Cell::float(s),
    ]
}
