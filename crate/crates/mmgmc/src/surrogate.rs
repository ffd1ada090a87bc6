//! Local surrogates for the objective and their convexity certificates.
//!
//! Subtracting the quadratic `gamma_m ||x - w||^2` from the Moreau envelope
//! yields a minorizer of the envelope that touches it at the anchor `w`;
//! substituting that minorizer into the objective yields the majorizer
//!
//! ```text
//! F_M(x, w) = 0.5 ||y - Ax||^2 + lambda (||x||_1 - f_alpha(x)) + lambda gamma_m ||x - w||^2
//! ```
//!
//! which lies above `F` everywhere and is tangent to it at `w`. Convexity and
//! strong convexity of the surrogates reduce to spectral conditions on `AᵀA`,
//! certified here by dense symmetric eigendecomposition:
//!
//! - objective:   `λ_min(AᵀA) - lambda alpha            >= 0`
//! - surrogate:   `λ_min(AᵀA) + lambda (2 gamma_m - alpha) >= 0`
//! - a-strong:    `λ_min(AᵀA)/2 + lambda (gamma_m - alpha/2) - a >= 0`
//!
//! "Singular values" of a frame here means eigenvalues of `AᵀA` (squared
//! singular values of `A`): the tight-frame case `AᵀA = C I` has spectrum
//! `{C}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite_vector, ensure_len, gram_eigen_extremes};
use crate::model::{self, ProblemInstance};
use crate::moreau;

/// Curvature, anchor point and strong-convexity modulus of one surrogate.
#[derive(Debug, Clone)]
pub struct SurrogateParams {
    /// Minorizer curvature `gamma_m >= 0`.
    pub gamma_m: f64,
    /// Tangency point `w`.
    pub anchor: DVector<f64>,
    /// Strong-convexity modulus `a >= 0` asserted for this surrogate.
    pub strong_modulus: f64,
}

impl SurrogateParams {
    pub fn new(gamma_m: f64, anchor: DVector<f64>) -> Result<Self> {
        Self::with_modulus(gamma_m, anchor, 0.0)
    }

    pub fn with_modulus(gamma_m: f64, anchor: DVector<f64>, strong_modulus: f64) -> Result<Self> {
        if !(gamma_m >= 0.0 && gamma_m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma_m",
                requirement: "nonnegative and finite",
                value: gamma_m,
            });
        }
        if !(strong_modulus >= 0.0 && strong_modulus.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "strong_modulus",
                requirement: "nonnegative and finite",
                value: strong_modulus,
            });
        }
        ensure_finite_vector(&anchor, "anchor")?;
        Ok(Self {
            gamma_m,
            anchor,
            strong_modulus,
        })
    }
}

/// Outcome of a spectral semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    StrictlyConvex,
    Convex,
    NotCertified,
}

impl CertificateVerdict {
    /// True for both `Convex` and `StrictlyConvex`.
    pub fn is_certified(self) -> bool {
        !matches!(self, CertificateVerdict::NotCertified)
    }
}

/// Spectral evidence that a semidefiniteness condition holds or fails.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    /// Smallest eigenvalue of `AᵀA`.
    pub min_eigenvalue: f64,
    /// Value of the tested condition: nonnegative means certified.
    pub margin: f64,
    pub verdict: CertificateVerdict,
}

/// Scale-relative tolerance for floating-point eigensolves.
pub fn psd_tolerance(max_eigenvalue: f64) -> f64 {
    1e-10 * max_eigenvalue.max(1.0)
}

fn certificate_from_margin(min_eig: f64, max_eig: f64, margin: f64) -> ConvexityCertificate {
    let tol = psd_tolerance(max_eig);
    let verdict = if margin > tol {
        CertificateVerdict::StrictlyConvex
    } else if margin >= -tol {
        CertificateVerdict::Convex
    } else {
        CertificateVerdict::NotCertified
    };
    ConvexityCertificate {
        min_eigenvalue: min_eig,
        margin,
        verdict,
    }
}

/// Minorizer of the Moreau envelope: `f_alpha(x) - gamma_m ||x - anchor||^2`.
pub fn minorizer_envelope(
    problem: &ProblemInstance,
    params: &SurrogateParams,
    x: &DVector<f64>,
) -> Result<f64> {
    ensure_len(x, problem.dim(), "vector x")?;
    ensure_len(&params.anchor, problem.dim(), "anchor")?;
    let env = moreau::moreau_envelope(problem.base(), problem.alpha(), x)?;
    Ok(env - params.gamma_m * (x - &params.anchor).norm_squared())
}

/// Majorizer value `F_M(x, w)`, computed by substituting the minorized
/// envelope into the objective.
pub fn majorizer_value(
    problem: &ProblemInstance,
    params: &SurrogateParams,
    x: &DVector<f64>,
) -> Result<f64> {
    ensure_len(x, problem.dim(), "vector x")?;
    let data = 0.5 * (problem.rhs() - problem.matrix() * x).norm_squared();
    let l1: f64 = x.iter().map(|v| v.abs()).sum();
    let minorized = minorizer_envelope(problem, params, x)?;
    Ok(data + problem.lambda() * (l1 - minorized))
}

/// Mirror construction: the minorizer `F(x) - lambda gamma_M ||x - w||^2` of
/// the objective, obtained from the envelope majorizer with curvature
/// `gamma_M > 0`. Evaluation only; no maximization driver is provided.
pub fn minorizer_objective_value(
    problem: &ProblemInstance,
    gamma_big: f64,
    w: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<f64> {
    if !(gamma_big > 0.0 && gamma_big.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma_M",
            requirement: "positive and finite",
            value: gamma_big,
        });
    }
    ensure_len(w, problem.dim(), "anchor")?;
    let total = model::evaluate_objective(problem, x)?.total;
    Ok(total - problem.lambda() * gamma_big * (x - w).norm_squared())
}

/// Certifies convexity of the objective itself: `AᵀA - lambda alpha I ⪰ 0`.
pub fn certify_objective_convexity(
    a: &DMatrix<f64>,
    lambda: f64,
    alpha: f64,
) -> Result<ConvexityCertificate> {
    let (min_eig, max_eig) = gram_eigen_extremes(a)?;
    Ok(certificate_from_margin(
        min_eig,
        max_eig,
        min_eig - lambda * alpha,
    ))
}

/// Certifies convexity of the majorizer: `AᵀA + lambda (2 gamma_m - alpha) I ⪰ 0`.
pub fn certify_surrogate_convexity(
    a: &DMatrix<f64>,
    lambda: f64,
    alpha: f64,
    gamma_m: f64,
) -> Result<ConvexityCertificate> {
    let (min_eig, max_eig) = gram_eigen_extremes(a)?;
    Ok(certificate_from_margin(
        min_eig,
        max_eig,
        min_eig + lambda * (2.0 * gamma_m - alpha),
    ))
}

/// Certifies `a`-strong convexity of the majorizer:
/// `AᵀA/2 + lambda (gamma_m - alpha/2) I ⪰ a I`.
pub fn certify_strong_convexity(
    a: &DMatrix<f64>,
    lambda: f64,
    alpha: f64,
    gamma_m: f64,
    strong_modulus: f64,
) -> Result<ConvexityCertificate> {
    if !(strong_modulus >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "strong_modulus",
            requirement: "nonnegative",
            value: strong_modulus,
        });
    }
    let (min_eig, max_eig) = gram_eigen_extremes(a)?;
    Ok(certificate_from_margin(
        min_eig,
        max_eig,
        0.5 * min_eig + lambda * (gamma_m - 0.5 * alpha) - strong_modulus,
    ))
}

/// Smallest curvature making the `a`-strong-convexity margin nonnegative:
///
/// ```text
/// gamma_m* = (a - λ_min(AᵀA)/2) / lambda + alpha/2
/// ```
///
/// clamped below at zero. When the objective certificate fails this equals
/// `a/lambda + (lambda alpha - sigma_0) / (2 lambda)` with `sigma_0` the
/// smallest eigenvalue of `AᵀA`.
pub fn minimal_gamma(
    a: &DMatrix<f64>,
    lambda: f64,
    alpha: f64,
    strong_modulus: f64,
) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            requirement: "positive and finite",
            value: lambda,
        });
    }
    let (min_eig, _) = gram_eigen_extremes(a)?;
    Ok(((strong_modulus - 0.5 * min_eig) / lambda + 0.5 * alpha).max(0.0))
}

/// Gradient of the smooth part of the majorizer (everything except
/// `lambda ||x||_1`): `Aᵀ(Ax - y) - lambda ∇f_alpha(x) + 2 lambda gamma_m (x - anchor)`.
pub fn majorizer_smooth_gradient(
    problem: &ProblemInstance,
    params: &SurrogateParams,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    ensure_len(x, problem.dim(), "vector x")?;
    ensure_len(&params.anchor, problem.dim(), "anchor")?;
    let data = model::residual_gradient(problem, x)?;
    let env = moreau::moreau_gradient(problem.base(), problem.alpha(), x)?;
    Ok(data - env * problem.lambda()
        + (x - &params.anchor) * (2.0 * problem.lambda() * params.gamma_m))
}
