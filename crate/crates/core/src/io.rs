//! Deterministic CSV/JSON helpers shared by the library and the CLI.
//!
//! CSV uses `.` decimals, no locale, and 17 significant digits for floats so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv cell text must not contain commas or newlines: {0:?}")]
    BadText(String),
    #[error("csv parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
}

/// One CSV cell. Masked/absent values serialize as empty fields.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn float<T: Real>(x: T) -> Self {
        Cell::Float(x.as_f64())
    }

    pub fn opt_float<T: Real>(x: Option<T>) -> Self {
        match x {
            Some(v) => Cell::Float(v.as_f64()),
            None => Cell::Empty,
        }
    }
}

/// 17 significant digits, scientific notation; round-trips every f64.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Render header + rows into deterministic CSV text (`\n` line endings).
pub fn csv_to_string(header: &[&str], rows: &[Vec<Cell>]) -> Result<String, IoError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            match cell {
                Cell::Float(x) => {
                    let _ = write!(out, "{}", format_float(*x));
                }
                Cell::Int(v) => {
                    let _ = write!(out, "{v}");
                }
                Cell::Text(t) => {
                    if t.contains(',') || t.contains('\n') {
                        return Err(IoError::BadText(t.clone()));
                    }
                    out.push_str(t);
                }
                Cell::Empty => {}
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), IoError> {
    let text = csv_to_string(header, rows)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Parsed CSV: header names plus string-valued rows.
pub struct CsvData {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvData {
    pub fn column_index(&self, name: &str) -> Result<usize, IoError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::MissingColumn(name.to_string()))
    }

    /// Column as `f64`, skipping empty cells.
    pub fn float_column(&self, name: &str) -> Result<Vec<f64>, IoError> {
        let idx = self.column_index(name)?;
        let mut out = Vec::new();
        for (lineno, row) in self.rows.iter().enumerate() {
            let raw = row.get(idx).map(|s| s.as_str()).unwrap_or("");
            if raw.is_empty() {
                continue;
            }
            let v = raw.parse::<f64>().map_err(|e| IoError::Parse {
                line: lineno + 2,
                message: format!("{raw:?}: {e}"),
            })?;
            out.push(v);
        }
        Ok(out)
    }
}

/// Parse CSV text produced by [`csv_to_string`] (no quoting or escapes).
pub fn parse_csv(text: &str) -> Result<CsvData, IoError> {
    let mut lines = text.lines();
    let header_line = lines.next().ok_or(IoError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let header: Vec<String> = header_line.split(',').map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        rows.push(line.split(',').map(|s| s.to_string()).collect());
    }
    Ok(CsvData { header, rows })
}

pub fn read_csv(path: &Path) -> Result<CsvData, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text)
}

/// JSON form of a complex matrix or vector: `{dims, re, im}` with row-major
/// flattening for matrices. `dims` is the subsystem layout, not the matrix
/// shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(dims: Vec<usize>, m: &DMatrix<Complex<T>>) -> Self {
        let mut re = Vec::with_capacity(m.nrows() * m.ncols());
        let mut im = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re.as_f64());
                im.push(m[(i, j)].im.as_f64());
            }
        }
        Self { dims, re, im }
    }

    pub fn from_vector<T: Real>(dims: Vec<usize>, v: &DVector<Complex<T>>) -> Self {
        Self {
            dims,
            re: v.iter().map(|z| z.re.as_f64()).collect(),
            im: v.iter().map(|z| z.im.as_f64()).collect(),
        }
    }

    /// Reassemble a square row-major matrix of dimension `n`.
    pub fn to_square_matrix<T: Real>(&self, n: usize) -> Option<DMatrix<Complex<T>>> {
        if self.re.len() != n * n || self.im.len() != n * n {
            return None;
        }
        Some(DMatrix::from_fn(n, n, |i, j| {
            let k = i * n + j;
            Complex::new(T::of(self.re[k]), T::of(self.im[k]))
        }))
    }

    pub fn to_vector<T: Real>(&self) -> Option<DVector<Complex<T>>> {
        if self.re.len() != self.im.len() {
            return None;
        }
        Some(DVector::from_iterator(
            self.re.len(),
            self.re
                .iter()
                .zip(&self.im)
                .map(|(&r, &i)| Complex::new(T::of(r), T::of(i))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_roundtrips() {
        for &x in &[0.1f64, -3.5e-12, std::f64::consts::PI, 1.0 / 3.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "failed for {s}");
        }
    }

    #[test]
    fn csv_write_parse_roundtrip() {
        let rows = vec![
            vec![Cell::Int(0), Cell::Float(0.5), Cell::Empty],
            vec![Cell::Int(1), Cell::Float(-1.25), Cell::Text("ok".into())],
        ];
        let text = csv_to_string(&["i", "x", "note"], &rows).unwrap();
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.header, vec!["i", "x", "note"]);
        let xs = parsed.float_column("x").unwrap();
        assert_eq!(xs, vec![0.5, -1.25]);
        let notes = parsed.column_index("note").unwrap();
        assert_eq!(parsed.rows[0][notes], "");
    }

    #[test]
    fn csv_rejects_commas_in_text() {
        let rows = vec![vec![Cell::Text("a,b".into())]];
        assert!(csv_to_string(&["t"], &rows).is_err());
    }
}
