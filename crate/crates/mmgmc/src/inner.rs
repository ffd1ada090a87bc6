//! Ball-constrained minimization of a certified-convex majorizer.
//!
//! Each outer iteration of the shrinking-ball scheme needs
//! `argmin { F_M(x, w) : ||x - w|| <= r }`. The majorizer splits into an
//! L-smooth part and `lambda ||x||_1 + indicator(ball)`, so proximal gradient
//! with fixed step `1/L` applies. The composite prox of l1-plus-ball is exact:
//! when the plain soft threshold lands inside the ball it is the answer,
//! otherwise the ball multiplier is pinned by bisection on a monotone scalar
//! dual. Starting from the ball center `w` makes the run deterministic and
//! guarantees `F_M(x*, w) <= F_M(w, w) = F(w)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite_vector, ensure_len, gram_eigen_extremes};
use crate::model::ProblemInstance;
use crate::moreau::soft_threshold;
use crate::surrogate::{self, SurrogateParams};

/// Configuration of the inner proximal-gradient solver.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct InnerConfig {
    /// Stop when the scaled step `L * ||z_{t+1} - z_t||` drops below this.
    pub tol_inner: f64,
    pub max_inner_iter: usize,
    /// Iteration budget for each composite-prox solve.
    pub dykstra_iter: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            tol_inner: 1e-9,
            max_inner_iter: 10_000,
            dykstra_iter: 500,
        }
    }
}

impl InnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_inner > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol_inner",
                requirement: "positive",
                value: self.tol_inner,
            });
        }
        if self.max_inner_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_inner_iter",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        if self.dykstra_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "dykstra_iter",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Result of one ball-constrained solve.
#[derive(Debug, Clone)]
pub struct InnerResult {
    pub x_star: DVector<f64>,
    /// Majorizer value at `x_star`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether `||x_star - w||` sits on the ball boundary within tolerance.
    pub active_constraint: bool,
}

/// Euclidean projection onto the closed ball `B_radius(center)`.
pub fn project_ball(center: &DVector<f64>, radius: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            requirement: "positive",
            value: radius,
        });
    }
    ensure_len(x, center.len(), "vector x")?;
    let offset = x - center;
    let dist = offset.norm();
    if dist <= radius {
        Ok(x.clone())
    } else {
        Ok(center + offset * (radius / dist))
    }
}

/// Proximal operator of `threshold ||.||_1 + indicator(B_radius(center))`
/// at `x`, i.e. the minimizer of
/// `threshold ||v||_1 + 0.5 ||v - x||^2 subject to ||v - center|| <= radius`.
///
/// When the plain soft threshold lands inside the ball it is returned exactly.
/// Otherwise the constraint is active and the solution is
/// `v(mu) = soft((x + mu center)/(1 + mu), threshold/(1 + mu))` at the unique
/// multiplier `mu > 0` placing `v(mu)` on the boundary; `||v(mu) - center||`
/// decreases monotonically in `mu`, so bisection pins it down. The returned
/// point is always feasible (taken at the upper bracket). Exhausting
/// `max_iter` before the bracket collapses is an error with diagnostics.
pub fn prox_l1_plus_ball(
    threshold: f64,
    center: &DVector<f64>,
    radius: f64,
    x: &DVector<f64>,
    max_iter: usize,
) -> Result<DVector<f64>> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            requirement: "nonnegative",
            value: threshold,
        });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            requirement: "positive",
            value: radius,
        });
    }
    ensure_len(x, center.len(), "vector x")?;

    if threshold == 0.0 {
        return project_ball(center, radius, x);
    }
    let shrunk = soft_threshold(x, threshold)?;
    if (&shrunk - center).norm() <= radius {
        return Ok(shrunk);
    }

    let candidate = |mu: f64| -> Result<DVector<f64>> {
        let scale = 1.0 + mu;
        soft_threshold(&((x + center * mu) / scale), threshold / scale)
    };
    let boundary_gap = |v: &DVector<f64>| (v - center).norm() - radius;

    // Bracket the multiplier: gap(0) > 0 (shortcut failed), gap -> -radius.
    let mut iterations = 0usize;
    let mut mu_lo = 0.0;
    let mut mu_hi = 1.0;
    let mut gap_hi = boundary_gap(&candidate(mu_hi)?);
    while gap_hi > 0.0 {
        iterations += 1;
        if iterations >= max_iter {
            return Err(Error::CompositeProxStalled {
                iterations,
                residual: gap_hi,
                threshold,
                radius,
            });
        }
        mu_lo = mu_hi;
        mu_hi *= 2.0;
        gap_hi = boundary_gap(&candidate(mu_hi)?);
    }

    while iterations < max_iter {
        iterations += 1;
        let mid = 0.5 * (mu_lo + mu_hi);
        if mid <= mu_lo || mid >= mu_hi {
            break; // bracket collapsed to adjacent floats
        }
        if boundary_gap(&candidate(mid)?) > 0.0 {
            mu_lo = mid;
        } else {
            mu_hi = mid;
        }
        if (mu_hi - mu_lo) <= 1e-15 * mu_hi {
            break;
        }
    }

    let v = candidate(mu_hi)?;
    let residual = boundary_gap(&v).abs();
    // The bracket either collapsed (solution pinned to float precision) or the
    // budget ran out with the boundary still unresolved.
    if (mu_hi - mu_lo) > 1e-12 * mu_hi.max(1.0) && residual > 1e-9 * radius.max(1.0) {
        return Err(Error::CompositeProxStalled {
            iterations,
            residual,
            threshold,
            radius,
        });
    }
    Ok(v)
}

/// Lipschitz constant of the majorizer's smooth-part gradient:
/// `λ_max(AᵀA) + lambda alpha + 2 lambda gamma_m`.
pub fn lipschitz_bound(
    a: &nalgebra::DMatrix<f64>,
    lambda: f64,
    alpha: f64,
    gamma_m: f64,
) -> Result<f64> {
    let (_, l_max) = gram_eigen_extremes(a)?;
    Ok(l_max + lambda * alpha + 2.0 * lambda * gamma_m)
}

/// Minimizes the majorizer `F_M(., w)` over `B_radius(w)` to inner tolerance.
///
/// Refuses to run unless the surrogate convexity certificate passes. The
/// anchor is both the ball center and the start point, so the best iterate
/// returned never exceeds `F_M(w, w) = F(w)`.
pub fn minimize_majorizer_in_ball(
    problem: &ProblemInstance,
    params: &SurrogateParams,
    radius: f64,
    config: &InnerConfig,
) -> Result<InnerResult> {
    config.validate()?;
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter {
            name: "radius",
            requirement: "positive",
            value: radius,
        });
    }
    ensure_len(&params.anchor, problem.dim(), "anchor")?;
    ensure_finite_vector(&params.anchor, "anchor")?;

    let cert = surrogate::certify_surrogate_convexity(
        problem.matrix(),
        problem.lambda(),
        problem.alpha(),
        params.gamma_m,
    )?;
    if !cert.verdict.is_certified() {
        let required = if problem.lambda() > 0.0 {
            (problem.alpha() / 2.0 - cert.min_eigenvalue / (2.0 * problem.lambda())).max(0.0)
        } else {
            0.0
        };
        return Err(Error::SurrogateNotCertified {
            margin: cert.margin,
            required_gamma: required,
        });
    }

    let step_l = lipschitz_bound(
        problem.matrix(),
        problem.lambda(),
        problem.alpha(),
        params.gamma_m,
    )?
    .max(f64::MIN_POSITIVE);
    let threshold = problem.lambda() / step_l;
    let w = &params.anchor;

    let mut z = w.clone();
    let mut best = w.clone();
    let mut best_val = surrogate::majorizer_value(problem, params, w)?;
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=config.max_inner_iter {
        let grad = surrogate::majorizer_smooth_gradient(problem, params, &z)?;
        let target = &z - grad / step_l;
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown {
                context: "inner proximal-gradient step",
            });
        }
        let z_next = prox_l1_plus_ball(threshold, w, radius, &target, config.dykstra_iter)?;
        let val = surrogate::majorizer_value(problem, params, &z_next)?;
        if val < best_val {
            best_val = val;
            best.copy_from(&z_next);
        }
        let change = (&z_next - &z).norm();
        z = z_next;
        iterations = t;
        if change * step_l <= config.tol_inner {
            converged = true;
            break;
        }
    }

    let dist = (&best - w).norm();
    let active_constraint = dist >= radius - 1e-9 * radius.max(1.0);
    Ok(InnerResult {
        x_star: best,
        objective: best_val,
        iterations,
        converged,
        active_constraint,
    })
}
