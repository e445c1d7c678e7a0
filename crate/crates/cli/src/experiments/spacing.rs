//! Level-spacing experiment: spectrum of a built Hamiltonian or synthetic
//! reference spacings, with the Brody fit and regime label.

use caslab_core::hamiltonians::{
    level_spacing_stats_with, sample_poisson_spacings, sample_wigner_spacings, SpacingConfig,
    SpectralStats,
};
use caslab_core::io::{csv_to_string, Cell};
use caslab_core::random::rng_from_seed;
use serde_json::json;

use super::{json_file, ExperimentOutput, FileContent, OutputFile};
use crate::config::{SpacingParams, SpacingSource};
use crate::error::CliError;

pub fn run(params: &SpacingParams, seed: u64) -> Result<ExperimentOutput, CliError> {
    let config = SpacingConfig {
        unfold_degree: params.unfold_degree,
        ..SpacingConfig::default()
    };
    let stats: SpectralStats<f64> = match &params.source {
        SpacingSource::Hamiltonian { hamiltonian } => {
            let h = hamiltonian.build()?;
            level_spacing_stats_with(&h, &config).map_err(CliError::from_runtime_err)?
        }
        SpacingSource::Synthetic {
            distribution,
            count,
        } => {
            let mut rng = rng_from_seed(seed);
            let samples = match distribution.as_str() {
                "poisson" => sample_poisson_spacings(*count, &mut rng),
                "wigner" => sample_wigner_spacings(*count, &mut rng),
                other => {
                    return Err(CliError::config(format!(
                        "unknown synthetic distribution {other:?}"
                    )))
                }
            };
            SpectralStats::from_spacings(samples, &config).map_err(CliError::from_runtime_err)?
        }
    };

    let n = stats.eigenvalues.len().max(stats.spacings.len());
    let rows: Vec<Vec<Cell>> = (0..n)
        .map(|k| {
            vec![
                Cell::Int(k as i64),
                Cell::opt_float(stats.eigenvalues.get(k).copied()),
                Cell::opt_float(stats.spacings.get(k).copied()),
            ]
        })
        .collect();
    let csv = csv_to_string(&["index", "eigenvalue", "spacing"], &rows)
        .map_err(CliError::from_runtime_err)?;

    let summary = json!({
        "brody_q": stats.brody_q,
        "brody_a": stats.brody_a,
        "regime": stats.regime,
        "warnings": stats.warnings,
        "n_levels": stats.eigenvalues.len(),
        "n_spacings": stats.spacings.len(),
    });

    Ok(ExperimentOutput {
        files: vec![
            OutputFile {
                name: "spacing.csv".into(),
                content: FileContent::Csv(csv),
            },
            json_file("summary.json", &summary)?,
        ],
        summary,
    })
}
