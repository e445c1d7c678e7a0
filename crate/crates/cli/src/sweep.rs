//! Parameter-grid sweeps: Cartesian expansion over dotted paths into the
//! parameter block, resumable point directories, and a deterministic
//! aggregate table.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::Value;

use caslab_core::io::{csv_to_string, Cell};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::runner::{run_into, write_atomic, OutputFormat};

const MAX_POINTS: usize = 10_000;

pub struct SweepResult {
    pub points: usize,
    pub failures: usize,
}

/// Expand the grid, run every point (skipping completed ones), and write
/// `aggregate.csv` with one row per point in lexicographic grid order.
pub fn run_sweep(
    config: &ExperimentConfig,
    dir: &Path,
    seed_override: Option<u64>,
    format: OutputFormat,
) -> Result<SweepResult, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep command needs a sweep block in the config"))?;
    if sweep.grid.is_empty() {
        return Err(CliError::config("sweep grid must not be empty"));
    }
    for (key, values) in &sweep.grid {
        if values.is_empty() {
            return Err(CliError::config(format!("grid axis {key:?} has no values")));
        }
    }
    let n_points: usize = sweep.grid.values().map(|v| v.len()).product();
    if n_points > MAX_POINTS {
        return Err(CliError::config(format!(
            "grid has {n_points} points, limit is {MAX_POINTS}"
        )));
    }

    // Keys in sorted order (BTreeMap), first axis slowest: row order is the
    // lexicographic order of grid coordinates.
    let keys: Vec<&String> = sweep.grid.keys().collect();
    let sizes: Vec<usize> = keys.iter().map(|k| sweep.grid[*k].len()).collect();

    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;

    let mut failures = 0usize;
    let mut rows_meta: Vec<(Vec<Value>, String, Option<Value>, Option<String>)> = Vec::new();

    let width = n_points.to_string().len().max(4);
    for flat in 0..n_points {
        // Decode the mixed-radix coordinate.
        let mut rem = flat;
        let mut coord = vec![0usize; keys.len()];
        for axis in (0..keys.len()).rev() {
            coord[axis] = rem % sizes[axis];
            rem /= sizes[axis];
        }
        let values: Vec<Value> = keys
            .iter()
            .zip(&coord)
            .map(|(k, &i)| sweep.grid[*k][i].clone())
            .collect();

        // Materialize the point config.
        let mut point_config = config.clone();
        point_config.sweep = None;
        for (key, value) in keys.iter().zip(&values) {
            set_path(&mut point_config.params, key, value.clone())?;
        }

        let point_dir = dir.join(format!("point_{flat:0width$}"));
        let done = point_dir.join(crate::manifest::MANIFEST_NAME).exists()
            && RunManifest::read(&point_dir)
                .map(|m| m.validate_against(&point_dir))
                .unwrap_or(false);

        let outcome = if done {
            read_point_summary(&point_dir)
        } else {
            // Validate then run; a failed point is recorded, not fatal.
            match point_config
                .typed_params()
                .map(|_| ())
                .and_then(|_| run_into(&point_config, &point_dir, seed_override, format))
            {
                Ok(result) => Ok(result.summary),
                Err(e) => Err(e),
            }
        };

        match outcome {
            Ok(summary) => {
                rows_meta.push((values, "ok".to_string(), Some(summary), None));
            }
            Err(e) => {
                failures += 1;
                log::warn!("sweep point {flat} failed: {e}");
                rows_meta.push((values, "error".to_string(), None, Some(e.to_string())));
            }
        }
    }

    // Columns: grid keys, status, then the union of numeric summary fields.
    let mut summary_cols: BTreeSet<String> = BTreeSet::new();
    for (_, _, summary, _) in &rows_meta {
        if let Some(Value::Object(map)) = summary {
            for (k, v) in map {
                if v.is_number() {
                    summary_cols.insert(k.clone());
                }
            }
        }
    }
    let mut header: Vec<String> = vec!["point".to_string()];
    header.extend(keys.iter().map(|k| (*k).clone()));
    header.push("status".to_string());
    header.extend(summary_cols.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();

    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(rows_meta.len());
    for (flat, (values, status, summary, _err)) in rows_meta.iter().enumerate() {
        let mut row = vec![Cell::Int(flat as i64)];
        for v in values {
            row.push(json_cell(v));
        }
        row.push(Cell::Text(status.clone()));
        for col in &summary_cols {
            let cell = summary
                .as_ref()
                .and_then(|s| s.get(col))
                .and_then(|v| v.as_f64())
                .map(Cell::Float)
                .unwrap_or(Cell::Empty);
            row.push(cell);
        }
        rows.push(row);
    }
    let csv = csv_to_string(&header_refs, &rows).map_err(CliError::from_runtime_err)?;
    write_atomic(&dir.join("aggregate.csv"), csv.as_bytes())?;

    Ok(SweepResult {
        points: n_points,
        failures,
    })
}

fn read_point_summary(point_dir: &Path) -> Result<Value, CliError> {
    let path = point_dir.join("summary.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::runtime(format!("corrupt summary {}: {e}", path.display())))
}

fn json_cell(v: &Value) -> Cell {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(Cell::Float)
            .unwrap_or(Cell::Text(n.to_string())),
        Value::String(s) => Cell::Text(s.clone()),
        Value::Bool(b) => Cell::Text(b.to_string()),
        other => Cell::Text(other.to_string()),
    }
}

/// Set a dotted path inside a JSON value, creating objects as needed only
/// when the leaf's parent exists; a missing intermediate is a config error.
fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let mut current = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let is_leaf = i + 1 == segments.len();
        let obj = current.as_object_mut().ok_or_else(|| {
            CliError::config(format!("grid path {path:?}: segment {seg:?} is not an object"))
        })?;
        if is_leaf {
            obj.insert((*seg).to_string(), value);
            return Ok(());
        }
        current = obj.get_mut(*seg).ok_or_else(|| {
            CliError::config(format!("grid path {path:?}: missing segment {seg:?}"))
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn set_path_replaces_nested_leaf() {
        let mut v = json!({"measurement": {"p_site": 0.1}, "dt": 0.5});
        set_path(&mut v, "measurement.p_site", json!(0.9)).unwrap();
        assert_eq!(v["measurement"]["p_site"], json!(0.9));
        set_path(&mut v, "dt", json!(1.5)).unwrap();
        assert_eq!(v["dt"], json!(1.5));
        assert!(set_path(&mut v, "missing.inner", json!(1)).is_err());
    }
}
