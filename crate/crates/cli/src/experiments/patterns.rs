//! Entanglement-pattern sampling and the labeled-atom combinatorics.

use caslab_core::patterns::{enumerate_pair_relations, pair_count, pattern_space_size, sample_pattern};
use caslab_core::random::derive_seed;
use serde_json::json;

use super::{json_file, ExperimentOutput};
use crate::config::PatternsParams;
use crate::error::CliError;

pub fn run(params: &PatternsParams, seed: u64) -> Result<ExperimentOutput, CliError> {
    let mut files = Vec::new();
    for k in 0..params.count {
        let pattern = sample_pattern(params.peptide_length, derive_seed(seed, k as u64))
            .map_err(CliError::from_runtime_err)?;
        files.push(json_file(&format!("pattern_{k:03}.json"), &pattern)?);
    }

    let n_pairs = pair_count(10).map_err(CliError::from_runtime_err)?;
    let space = pattern_space_size(n_pairs as usize);
    let space_str = space.to_string();
    let summary = json!({
        "peptide_length": params.peptide_length,
        "count": params.count,
        "pair_count": n_pairs,
        "n_relations": enumerate_pair_relations().len(),
        "pattern_space_size": space_str,
        "pattern_space_digits": space_str.len(),
    });
    files.push(json_file("combinatorics.json", &summary)?);
    files.push(json_file("summary.json", &summary)?);
    Ok(ExperimentOutput { files, summary })
}
