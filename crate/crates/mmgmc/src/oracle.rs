//! Independent brute-force and closed-form oracles.
//!
//! These validate the solver modules at desk scale and deliberately share no
//! code with them: an oracle built on solver internals cannot catch solver
//! bugs. Everything here is pure and deterministic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

const GRID_GUARD: u128 = 10_000_000;

/// A rectangular lattice for exhaustive minimization.
#[derive(Debug, Clone)]
pub struct GridSpec {
    lower: DVector<f64>,
    upper: DVector<f64>,
    points_per_dim: usize,
}

impl GridSpec {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>, points_per_dim: usize) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "grid bounds",
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if points_per_dim == 0 {
            return Err(Error::InvalidParameter {
                name: "points_per_dim",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        for i in 0..lower.len() {
            if !(lower[i] < upper[i]) {
                return Err(Error::InvalidParameter {
                    name: "grid bounds",
                    requirement: "lower < upper componentwise",
                    value: upper[i] - lower[i],
                });
            }
        }
        let cells = (points_per_dim as u128).checked_pow(lower.len() as u32);
        match cells {
            Some(c) if c <= GRID_GUARD => Ok(Self {
                lower,
                upper,
                points_per_dim,
            }),
            Some(c) => Err(Error::GridTooLarge {
                cells: c,
                max_cells: GRID_GUARD,
            }),
            None => Err(Error::GridTooLarge {
                cells: u128::MAX,
                max_cells: GRID_GUARD,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Lattice coordinate along dimension `d` at index `i`.
    fn coord(&self, d: usize, i: usize) -> f64 {
        if self.points_per_dim == 1 {
            return self.lower[d];
        }
        let frac = i as f64 / (self.points_per_dim - 1) as f64;
        self.lower[d] + frac * (self.upper[d] - self.lower[d])
    }
}

/// Exhaustively evaluates `f` on the lattice and returns the minimizing point
/// and value. Ties break to the lexicographically first lattice point; NaN
/// values never win.
pub fn grid_minimize<F>(mut f: F, grid: &GridSpec) -> Result<(DVector<f64>, f64)>
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let n = grid.dim();
    let mut idx = vec![0usize; n];
    let mut x = DVector::from_fn(n, |d, _| grid.coord(d, 0));
    let mut best_x = x.clone();
    let mut best_val = f64::INFINITY;

    loop {
        let val = f(&x);
        if val < best_val {
            best_val = val;
            best_x.copy_from(&x);
        }

        // Odometer increment in row-major (lexicographic) order.
        let mut d = n;
        loop {
            if d == 0 {
                return Ok((best_x, best_val));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < grid.points_per_dim {
                x[d] = grid.coord(d, idx[d]);
                break;
            }
            idx[d] = 0;
            x[d] = grid.coord(d, 0);
        }
    }
}

/// One-sided finite-difference directional derivative `(f(x + h d) - f(x)) / h`.
pub fn finite_difference_directional<F>(mut f: F, x: &DVector<f64>, d: &DVector<f64>, h: f64) -> f64
where
    F: FnMut(&DVector<f64>) -> f64,
{
    (f(&(x + d * h)) - f(x)) / h
}

/// Iterative soft-thresholding for the l1-regularized least squares problem
/// `min_x 0.5 ||y - Ax||^2 + lambda ||x||_1`, with fixed step `1/λ_max(AᵀA)`.
///
/// Stops when the iterate change drops below `tol`; errors if `max_iter`
/// is exhausted first.
pub fn ista_lasso(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    if lambda < 0.0 {
        return Err(Error::InvalidParameter {
            name: "lambda",
            requirement: "nonnegative",
            value: lambda,
        });
    }
    let (_, l_max) = linalg::gram_eigen_extremes(a)?;
    let step = if l_max > 0.0 { 1.0 / l_max } else { 1.0 };
    let thresh = step * lambda;

    let mut x = DVector::zeros(a.ncols());
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let grad = a.transpose() * (a * &x - y);
        let next = (&x - &grad * step).map(|v| v.signum() * (v.abs() - thresh).max(0.0));
        change = (&next - &x).norm();
        x = next;
        if change <= tol {
            return Ok(x);
        }
    }
    Err(Error::MaxIterationsExceeded {
        max_iter,
        residual: change,
    })
}

/// Least-squares solution of `min_x 0.5 ||y - Ax||^2` via SVD; returns the
/// minimum-norm solution when `AᵀA` is singular.
pub fn least_squares_solve(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(y, 1e-12)
        .expect("SVD solve cannot fail when U and V are computed")
}
