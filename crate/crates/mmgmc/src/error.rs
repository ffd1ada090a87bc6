//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by problem construction, evaluation and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length/shape.
    #[error("{what}: expected length {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// An input contained NaN or infinity.
    #[error("{what} contains a non-finite entry")]
    NonFinite { what: &'static str },

    /// A scalar parameter violated its precondition.
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// The ball-constrained subproblem was handed a surrogate whose
    /// convexity certificate failed; the solver refuses to run.
    #[error(
        "surrogate convexity not certified (margin {margin:.6e}); \
         increase gamma_m to at least {required_gamma:.6e}"
    )]
    SurrogateNotCertified { margin: f64, required_gamma: f64 },

    /// The initial point sits too close to the origin for the shrinking-ball
    /// iteration: the rule ||x0||_2 > 2*epsilon must hold.
    #[error(
        "initialization rule violated: ||x0||_2 > 2*epsilon is required, \
         got ||x0||_2 = {x0_norm:.6e} with 2*epsilon = {threshold:.6e}"
    )]
    InitializationTooClose { x0_norm: f64, threshold: f64 },

    /// The composite-prox solve (l1 plus ball constraint) ran out of its
    /// iteration budget before reaching tolerance.
    #[error(
        "composite prox (l1 + ball) did not converge within {iterations} iterations: \
         boundary residual {residual:.3e} (shrinkage {threshold:.3e}, radius {radius:.3e})"
    )]
    CompositeProxStalled {
        iterations: usize,
        residual: f64,
        threshold: f64,
        radius: f64,
    },

    /// An iterative routine ran out of its iteration budget.
    #[error("iteration budget of {max_iter} exhausted (residual {residual:.3e})")]
    MaxIterationsExceeded { max_iter: usize, residual: f64 },

    /// A NaN or infinity appeared while iterating.
    #[error("non-finite value encountered during {context}")]
    NumericalBreakdown { context: &'static str },

    /// An exhaustive grid would exceed the evaluation guard.
    #[error("grid of {cells} points exceeds the {max_cells}-point guard")]
    GridTooLarge { cells: u128, max_cells: u128 },

    /// A custom base function failed the registration self-test.
    #[error("base function rejected at registration: {reason}")]
    BaseFunctionRejected { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
