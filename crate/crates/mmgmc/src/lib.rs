//! Nonconvex sparse least squares via strongly convex majorization-minimization.
//!
//! This crate solves
//!
//! ```text
//! min_x F(x) = 0.5 ||y - Ax||_2^2 + lambda (||x||_1 - f_alpha(x))
//! ```
//!
//! where `f_alpha` is the Moreau envelope of a convex base function. The
//! penalty generalizes the minimax-concave (GMC) family: it promotes sparsity
//! more aggressively than a plain l1 term while staying exactly computable
//! through proximal operators. The objective is nonconvex in general, so the
//! solver minimizes a sequence of convex local majorizers over shrinking
//! balls, with spectral certificates guarding every surrogate.
//!
//! The pieces, one module each:
//!
//! - [`moreau`] — prox oracles, the Moreau envelope and its gradient, the
//!   closed-form Huber special case, soft thresholding.
//! - [`model`] — the problem instance and exact evaluation of the objective,
//!   penalty and one-sided directional derivatives.
//! - [`surrogate`] — local minorizers/majorizers, spectral convexity and
//!   strong-convexity certificates, and the minimal certified curvature.
//! - [`inner`] — the ball-constrained proximal-gradient subproblem solver
//!   with an exact composite prox for the l1-plus-ball term.
//! - [`driver`] — the shrinking-ball MM loop, trace invariants and
//!   stationarity diagnostics.
//! - [`oracle`] — independent brute-force oracles (grid search, finite
//!   differences, ISTA, least squares) used for validation.
//!
//! # Quick start
//!
//! ```
//! use mmgmc::nalgebra::{DMatrix, DVector};
//! use mmgmc::{BaseFunction, GammaMode, MMConfig, ProblemInstance};
//!
//! // A small sparse-recovery instance with a deliberately nonconvex penalty.
//! let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.2, 0.1, 0.9, 0.0, 0.3]);
//! let y = DVector::from_row_slice(&[1.1, 0.4, 0.2]);
//! let problem = ProblemInstance::new(a, y, 0.4, 1.5, BaseFunction::L1).unwrap();
//!
//! // Derive the smallest curvature certifying 0.05-strongly-convex surrogates.
//! let config = MMConfig::new(0.25, GammaMode::Auto { a: 0.05 });
//!
//! // The initial point must satisfy ||x0|| > 2 * epsilon.
//! let x0 = DVector::from_row_slice(&[1.0, 1.0]);
//! let (x_final, trace) = mmgmc::run_mm(&problem, &config, &x0).unwrap();
//!
//! // Monotone descent is guaranteed by construction.
//! let report = mmgmc::check_trace_invariants(&trace, 0.25, x0.norm());
//! assert!(report.all_passed());
//! assert!(trace.stationarity.unwrap().stationary || x_final.norm() > 0.0);
//! ```

// Parameter checks use the `!(x > 0.0)` form on purpose: it rejects NaN,
// which the un-negated comparison would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub use nalgebra;

pub mod driver;
pub mod error;
pub mod inner;
pub mod linalg;
pub mod model;
pub mod moreau;
pub mod oracle;
pub mod surrogate;

mod book;

pub use driver::{
    check_cauchy_property, check_trace_invariants, run_mm, stationarity_report, GammaMode,
    IterationRecord, IterationTrace, MMConfig, StationarityReport, TraceReport,
};
pub use error::{Error, Result};
pub use inner::{
    lipschitz_bound, minimize_majorizer_in_ball, project_ball, prox_l1_plus_ball, InnerConfig,
    InnerResult,
};
pub use model::{
    directional_derivative, evaluate_objective, evaluate_penalty, residual_gradient,
    ObjectiveValue, ProblemInstance,
};
pub use moreau::{
    huber_closed_form, moreau_envelope, moreau_gradient, soft_threshold, BaseFunction, ProxFunction,
};
pub use surrogate::{
    certify_objective_convexity, certify_strong_convexity, certify_surrogate_convexity,
    majorizer_smooth_gradient, majorizer_value, minimal_gamma, minorizer_envelope,
    minorizer_objective_value, CertificateVerdict, ConvexityCertificate, SurrogateParams,
};
