//! Weak-measurement experiment: pointer marginal, mean shift, weak value
//! and post-selection probabilities.

use caslab_core::io::{csv_to_string, Cell};
use caslab_core::measurement::{
    postselection_probability, weak_measure, weak_measure_postselected, weak_value,
    weakness_check, PointerGrid, PrePostSelection, WeakMeasurementSetup, WeakValue,
};
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::WeakParams;
use crate::error::CliError;

pub fn run(params: &WeakParams, _seed: u64) -> Result<ExperimentOutput, CliError> {
    let observable = params.observable.build()?;
    let state = params.state.build()?;
    let grid = PointerGrid::new(
        params.grid_points,
        params.grid_extent_sigmas * params.pointer_sigma,
    )
    .map_err(CliError::from_config_err)?;
    let setup = WeakMeasurementSetup::new(
        observable.clone(),
        params.coupling_g,
        params.pointer_sigma,
        grid,
    )
    .map_err(CliError::from_config_err)?;

    let is_weak = weakness_check(&setup);

    let (positions, probabilities, mean_shift, extra) = match &params.postselect {
        None => {
            let readout = weak_measure(&state, &setup).map_err(CliError::from_runtime_err)?;
            (
                readout.positions,
                readout.probabilities,
                readout.mean_shift,
                json!({}),
            )
        }
        Some(ps) => {
            let fin = ps.build()?;
            let sel = PrePostSelection::new(state.clone(), fin)
                .map_err(CliError::from_config_err)?;
            let readout =
                weak_measure_postselected(&sel, &setup).map_err(CliError::from_runtime_err)?;
            let wv = weak_value(&sel, &observable).map_err(CliError::from_runtime_err)?;
            let first_order = postselection_probability(&sel, &setup, true)
                .map_err(CliError::from_runtime_err)?;
            let extra = match wv {
                WeakValue::Finite(z) => json!({
                    "weak_value_re": z.re,
                    "weak_value_im": z.im,
                    "weak_value_divergent": false,
                    "p_postselect_exact": readout.postselection_probability,
                    "p_postselect_first_order": first_order,
                }),
                WeakValue::Divergent { numerator_mag, overlap_mag } => json!({
                    "weak_value_divergent": true,
                    "weak_value_numerator_mag": numerator_mag,
                    "weak_value_overlap_mag": overlap_mag,
                    "p_postselect_exact": readout.postselection_probability,
                    "p_postselect_first_order": first_order,
                }),
            };
            (
                readout.positions,
                readout.probabilities,
                readout.mean_shift,
                extra,
            )
        }
    };

    let rows: Vec<Vec<Cell>> = positions
        .iter()
        .zip(&probabilities)
        .map(|(&x, &p)| vec![Cell::float(x), Cell::float(p)])
        .collect();
    let csv =
        csv_to_string(&["x", "probability"], &rows).map_err(CliError::from_runtime_err)?;

    let mut summary = json!({
        "coupling_g": params.coupling_g,
        "pointer_sigma": params.pointer_sigma,
        "mean_shift": mean_shift,
        "weakness_check": is_weak,
    });
    if let (Some(obj), Some(extra_obj)) = (summary.as_object_mut(), extra.as_object()) {
        for (k, v) in extra_obj {
            obj.insert(k.clone(), v.clone());
        }
    }

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "pointer.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("setup.json", &setup.to_json())?,
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}
