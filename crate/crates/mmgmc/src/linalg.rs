//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Returns the Gram matrix `AᵀA`, symmetrized to guard against rounding.
pub fn gram_matrix(a: &DMatrix<f64>) -> DMatrix<f64> {
    let g = a.transpose() * a;
    (&g + g.transpose()) * 0.5
}

/// Extreme eigenvalues `(λ_min, λ_max)` of `AᵀA` via dense symmetric
/// eigendecomposition. Exact at desk scale; no Lanczos.
pub fn gram_eigen_extremes(a: &DMatrix<f64>) -> Result<(f64, f64)> {
    ensure_finite_matrix(a, "matrix A")?;
    let g = gram_matrix(a);
    let eig = g.symmetric_eigen();
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        min = min.min(v);
        max = max.max(v);
    }
    Ok((min, max))
}

/// Eigenpair (value, unit vector) for the smallest eigenvalue of `AᵀA`.
pub fn gram_min_eigenpair(a: &DMatrix<f64>) -> Result<(f64, DVector<f64>)> {
    ensure_finite_matrix(a, "matrix A")?;
    let g = gram_matrix(a);
    let eig = g.symmetric_eigen();
    let mut idx = 0;
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let vec = eig.eigenvectors.column(idx).into_owned();
    Ok((eig.eigenvalues[idx], vec))
}

pub(crate) fn ensure_finite_matrix(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_finite_vector(v: &DVector<f64>, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_len(v: &DVector<f64>, expected: usize, what: &'static str) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found: v.len(),
        })
    }
}
