//! Problem definition and exact evaluation of the cost function.
//!
//! The objective is
//!
//! ```text
//! F(x) = 0.5 ||y - Ax||_2^2 + lambda (||x||_1 - f_alpha(x))
//! ```
//!
//! where `f_alpha` is the Moreau envelope of an admissible convex base
//! function. The penalty `lambda (||x||_1 - f_alpha(x))` generalizes the
//! minimax-concave (GMC) family and is nonnegative for every registered base.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite_matrix, ensure_finite_vector, ensure_len};
use crate::moreau::{self, BaseFunction, ProxFunction};

/// The tuple `(A, y, lambda, alpha, base)` defining the objective.
///
/// Immutable after construction and safe to share across threads; every
/// evaluation is a pure function.
#[derive(Clone)]
pub struct ProblemInstance {
    a: DMatrix<f64>,
    y: DVector<f64>,
    lambda: f64,
    alpha: f64,
    base: Arc<dyn ProxFunction>,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("rows", &self.a.nrows())
            .field("cols", &self.a.ncols())
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .field("base", &self.base.name())
            .finish()
    }
}

impl ProblemInstance {
    /// Builds a problem over one of the registered base functions.
    pub fn new(
        a: DMatrix<f64>,
        y: DVector<f64>,
        lambda: f64,
        alpha: f64,
        base: BaseFunction,
    ) -> Result<Self> {
        Self::with_custom_base_unchecked(a, y, lambda, alpha, Arc::new(base))
    }

    /// Builds a problem over a custom prox function, running the registration
    /// self-test first.
    pub fn with_custom_base(
        a: DMatrix<f64>,
        y: DVector<f64>,
        lambda: f64,
        alpha: f64,
        base: Arc<dyn ProxFunction>,
    ) -> Result<Self> {
        moreau::validate_prox_function(base.as_ref(), a.ncols(), 0xC0FFEE)?;
        Self::with_custom_base_unchecked(a, y, lambda, alpha, base)
    }

    fn with_custom_base_unchecked(
        a: DMatrix<f64>,
        y: DVector<f64>,
        lambda: f64,
        alpha: f64,
        base: Arc<dyn ProxFunction>,
    ) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidParameter {
                name: "A",
                requirement: "at least 1x1",
                value: 0.0,
            });
        }
        ensure_finite_matrix(&a, "matrix A")?;
        ensure_finite_vector(&y, "vector y")?;
        ensure_len(&y, a.nrows(), "vector y")?;
        // The penalty weight may be zero (pure least squares); alpha may not.
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                requirement: "nonnegative and finite",
                value: lambda,
            });
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                requirement: "positive and finite",
                value: alpha,
            });
        }
        Ok(Self {
            a,
            y,
            lambda,
            alpha,
            base,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base(&self) -> &dyn ProxFunction {
        self.base.as_ref()
    }

    /// Number of observations (rows of `A`).
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    /// Number of unknowns (columns of `A`).
    pub fn dim(&self) -> usize {
        self.a.ncols()
    }
}

/// The objective decomposed into its three terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    /// `F(x) = data_fidelity + l1_term - envelope_term`, exactly as computed.
    pub total: f64,
    /// `0.5 ||y - Ax||_2^2`
    pub data_fidelity: f64,
    /// `lambda ||x||_1`
    pub l1_term: f64,
    /// `lambda f_alpha(x)`
    pub envelope_term: f64,
}

/// Evaluates `F(x)` with its decomposition.
pub fn evaluate_objective(problem: &ProblemInstance, x: &DVector<f64>) -> Result<ObjectiveValue> {
    check_point(problem, x, "vector x")?;
    let data_fidelity = 0.5 * (problem.rhs() - problem.matrix() * x).norm_squared();
    let l1_term = problem.lambda * l1_norm(x);
    let envelope_term = problem.lambda * moreau::moreau_envelope(problem.base(), problem.alpha, x)?;
    Ok(ObjectiveValue {
        total: data_fidelity + l1_term - envelope_term,
        data_fidelity,
        l1_term,
        envelope_term,
    })
}

/// Evaluates the penalty `lambda (||x||_1 - f_alpha(x))` alone.
pub fn evaluate_penalty(problem: &ProblemInstance, x: &DVector<f64>) -> Result<f64> {
    check_point(problem, x, "vector x")?;
    let envelope = moreau::moreau_envelope(problem.base(), problem.alpha, x)?;
    Ok(problem.lambda * (l1_norm(x) - envelope))
}

/// Exact one-sided directional derivative of `F` at `x` along `d`:
///
/// ```text
/// <Aᵀ(Ax - y), d> + lambda Σ_i s_i - lambda <∇f_alpha(x), d>
/// ```
///
/// where `s_i = sign(x_i) d_i` for `x_i != 0` and `|d_i|` at `x_i = 0` (the
/// lower one-sided derivative of the l1 norm). The envelope is differentiable,
/// so this is the exact directional derivative.
pub fn directional_derivative(
    problem: &ProblemInstance,
    x: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<f64> {
    check_point(problem, x, "vector x")?;
    check_point(problem, d, "direction d")?;
    let smooth = residual_gradient(problem, x)?.dot(d);
    let l1_onesided: f64 = x
        .iter()
        .zip(d.iter())
        .map(|(&xi, &di)| {
            if xi == 0.0 {
                di.abs()
            } else {
                xi.signum() * di
            }
        })
        .sum();
    let env_grad = moreau::moreau_gradient(problem.base(), problem.alpha, x)?;
    Ok(smooth + problem.lambda * l1_onesided - problem.lambda * env_grad.dot(d))
}

/// Gradient of the data-fidelity term, `Aᵀ(Ax - y)`.
pub fn residual_gradient(problem: &ProblemInstance, x: &DVector<f64>) -> Result<DVector<f64>> {
    ensure_len(x, problem.dim(), "vector x")?;
    Ok(problem.matrix().transpose() * (problem.matrix() * x - problem.rhs()))
}

fn check_point(problem: &ProblemInstance, x: &DVector<f64>, what: &'static str) -> Result<()> {
    ensure_len(x, problem.dim(), what)?;
    ensure_finite_vector(x, what)
}

fn l1_norm(x: &DVector<f64>) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}
