//! Header-free CSV matrices and vectors.
//!
//! Row-major, comma-separated, `.` decimal separator, no locale dependence.
//! Values are written in shortest round-trip form (at most 17 significant
//! digits), so save/load reproduces every finite f64 bit-exactly.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mmgmc::nalgebra::{DMatrix, DVector};

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            let value: f64 = field.parse().with_context(|| {
                format!(
                    "{}: line {lineno}: invalid number `{field}`",
                    path.display()
                )
            })?;
            if !value.is_finite() {
                bail!(
                    "{}: line {lineno}: non-finite value `{field}`",
                    path.display()
                );
            }
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => bail!(
                "{}: line {lineno}: ragged row has {} fields, expected {w}",
                path.display(),
                row.len()
            ),
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("{}: file contains no data rows", path.display());
    }
    let ncols = width.unwrap();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(DMatrix::from_row_slice(flat.len() / ncols, ncols, &flat))
}

/// Reads a vector: either one value per line or a single comma-separated row.
pub fn read_vector_csv(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() == 1 {
        Ok(DVector::from_column_slice(m.column(0).as_slice()))
    } else if m.nrows() == 1 {
        Ok(m.row(0).transpose())
    } else {
        bail!(
            "{}: expected a vector, found a {}x{} matrix",
            path.display(),
            m.nrows(),
            m.ncols()
        )
    }
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", m[(i, j)]);
        }
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_vector_csv(path: &Path, v: &DVector<f64>) -> Result<()> {
    let mut out = String::new();
    for value in v.iter() {
        let _ = writeln!(out, "{value}");
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}
