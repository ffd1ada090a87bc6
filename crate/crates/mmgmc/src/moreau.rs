//! Moreau envelopes and proximal operators.
//!
//! The envelope of a convex base function `f` at smoothing level `alpha > 0` is
//!
//! ```text
//! f_alpha(x) = inf_v { f(v) + (alpha/2) ||v - x||_2^2 }
//! ```
//!
//! For convex `f` the infimum is attained at the proximal point
//! `p = prox(x, 1/alpha)`, so the envelope is evaluated exactly through the
//! prox oracle rather than by numerical minimization. Its gradient is
//! `alpha * (x - p)` and is `alpha`-Lipschitz.

use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A convex base function exposed through value and prox oracles.
///
/// `prox(x, t)` must return `argmin_v f(v) + (1/(2t)) ||v - x||_2^2`. The scale
/// convention is `t = 1/alpha`, so the envelope infimand carries the weight
/// `alpha/2` on the quadratic.
pub trait ProxFunction: Send + Sync {
    fn name(&self) -> &str;

    /// Evaluates `f(v)`.
    fn value(&self, v: &DVector<f64>) -> f64;

    /// Evaluates the proximal point `argmin_v f(v) + (1/(2t)) ||v - x||^2`.
    fn prox(&self, x: &DVector<f64>, t: f64) -> DVector<f64>;
}

/// Built-in admissible base functions.
///
/// All registry members satisfy `f >= 0`, `f(0) = 0` and `f <= ||.||_1`
/// pointwise, which keeps the penalty `lambda (||x||_1 - f_alpha(x))`
/// nonnegative.
#[derive(Debug, Clone)]
pub enum BaseFunction {
    /// `f(v) = ||v||_1`; its envelope is the Huber function.
    L1,
    /// `f ≡ 0`; the penalty degenerates to a plain l1 regularizer.
    Zero,
    /// `f(v) = Σ s_i |v_i|` with per-coordinate scales `0 <= s_i <= 1`.
    ScaledL1(DVector<f64>),
}

impl BaseFunction {
    /// Builds a coordinate-wise scaled l1 base, validating `0 <= s_i <= 1`.
    pub fn scaled_l1(scale: DVector<f64>) -> Result<Self> {
        for &s in scale.iter() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::InvalidParameter {
                    name: "scale",
                    requirement: "within [0, 1] per coordinate",
                    value: s,
                });
            }
        }
        Ok(BaseFunction::ScaledL1(scale))
    }

    /// Looks a base function up by registry name (`l1`, `zero`, `scaled_l1`).
    pub fn from_name(name: &str, scale: Option<&[f64]>) -> Result<Self> {
        match name {
            "l1" => Ok(BaseFunction::L1),
            "zero" => Ok(BaseFunction::Zero),
            "scaled_l1" => {
                let s = scale.ok_or_else(|| Error::BaseFunctionRejected {
                    reason: "scaled_l1 requires a scale vector".into(),
                })?;
                BaseFunction::scaled_l1(DVector::from_row_slice(s))
            }
            other => Err(Error::BaseFunctionRejected {
                reason: format!("unknown base function name `{other}`"),
            }),
        }
    }
}

impl ProxFunction for BaseFunction {
    fn name(&self) -> &str {
        match self {
            BaseFunction::L1 => "l1",
            BaseFunction::Zero => "zero",
            BaseFunction::ScaledL1(_) => "scaled_l1",
        }
    }

    fn value(&self, v: &DVector<f64>) -> f64 {
        match self {
            BaseFunction::L1 => v.iter().map(|x| x.abs()).sum(),
            BaseFunction::Zero => 0.0,
            BaseFunction::ScaledL1(s) => v.iter().zip(s.iter()).map(|(x, si)| si * x.abs()).sum(),
        }
    }

    fn prox(&self, x: &DVector<f64>, t: f64) -> DVector<f64> {
        match self {
            BaseFunction::L1 => x.map(|xi| shrink(xi, t)),
            BaseFunction::Zero => x.clone(),
            BaseFunction::ScaledL1(s) => DVector::from_iterator(
                x.len(),
                x.iter().zip(s.iter()).map(|(&xi, &si)| shrink(xi, t * si)),
            ),
        }
    }
}

#[inline]
fn shrink(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// Moreau envelope `f_alpha(x)`, evaluated exactly through the prox oracle:
/// `f(p) + (alpha/2) ||p - x||^2` with `p = prox(x, 1/alpha)`.
pub fn moreau_envelope(f: &dyn ProxFunction, alpha: f64, x: &DVector<f64>) -> Result<f64> {
    check_alpha(alpha)?;
    let p = f.prox(x, 1.0 / alpha);
    Ok(f.value(&p) + 0.5 * alpha * (&p - x).norm_squared())
}

/// Gradient of the Moreau envelope, `alpha * (x - prox(x, 1/alpha))`.
pub fn moreau_gradient(f: &dyn ProxFunction, alpha: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_alpha(alpha)?;
    let p = f.prox(x, 1.0 / alpha);
    Ok((x - p) * alpha)
}

/// Closed-form Huber evaluation of the l1 envelope:
/// `Σ_i h(x_i)` with `h(t) = alpha t²/2` for `|t| <= 1/alpha`, else `|t| - 1/(2 alpha)`.
pub fn huber_closed_form(alpha: f64, x: &DVector<f64>) -> Result<f64> {
    check_alpha(alpha)?;
    let knee = 1.0 / alpha;
    Ok(x.iter()
        .map(|&t| {
            let a = t.abs();
            if a <= knee {
                0.5 * alpha * t * t
            } else {
                a - 0.5 * knee
            }
        })
        .sum())
}

/// Per-coordinate soft threshold `sign(x_i) max(|x_i| - t, 0)`; the prox of
/// `t ||.||_1` and the basic shrinkage step of l1 solvers.
pub fn soft_threshold(x: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            requirement: "nonnegative",
            value: t,
        });
    }
    Ok(x.map(|xi| shrink(xi, t)))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            requirement: "positive and finite",
            value: alpha,
        })
    }
}

/// Registration self-test for custom prox functions.
///
/// Samples random points of dimension `dim` and checks, with slack `1e-10`:
/// midpoint convexity of `value`, firm nonexpansiveness of `prox`, prox
/// optimality against random competitors, `f(0) = 0`, and the admissibility
/// envelope `0 <= f <= ||.||_1`. Built-ins pass by construction; custom
/// implementations must pass before being attached to a problem.
pub fn validate_prox_function(f: &dyn ProxFunction, dim: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| DVector::from_fn(dim, |_, _| rng.random_range(-5.0..5.0));

    let zero = DVector::zeros(dim);
    let f0 = f.value(&zero);
    if f0.abs() > 1e-12 {
        return Err(Error::BaseFunctionRejected {
            reason: format!("f(0) = {f0}, expected 0"),
        });
    }

    for trial in 0..200 {
        let u = sample(&mut rng);
        let v = sample(&mut rng);
        let t = rng.random_range(0.05..5.0);

        let fu = f.value(&u);
        if !fu.is_finite() || fu < -1e-12 {
            return Err(Error::BaseFunctionRejected {
                reason: format!("value not finite-nonnegative at trial {trial}: {fu}"),
            });
        }
        let l1: f64 = u.iter().map(|x| x.abs()).sum();
        if fu > l1 + 1e-10 {
            return Err(Error::BaseFunctionRejected {
                reason: format!("value exceeds the l1 norm at trial {trial}: {fu} > {l1}"),
            });
        }

        // Midpoint convexity.
        let mid = (&u + &v) * 0.5;
        if f.value(&mid) > 0.5 * (fu + f.value(&v)) + 1e-10 {
            return Err(Error::BaseFunctionRejected {
                reason: format!("midpoint convexity violated at trial {trial}"),
            });
        }

        // Firm nonexpansiveness (checked in its nonexpansive form).
        let pu = f.prox(&u, t);
        let pv = f.prox(&v, t);
        if (&pu - &pv).norm() > (&u - &v).norm() + 1e-10 {
            return Err(Error::BaseFunctionRejected {
                reason: format!("prox is expansive at trial {trial}"),
            });
        }

        // Prox optimality against a random competitor.
        let q = sample(&mut rng);
        let obj = |p: &DVector<f64>| f.value(p) + (p - &u).norm_squared() / (2.0 * t);
        if obj(&pu) > obj(&q) + 1e-10 {
            return Err(Error::BaseFunctionRejected {
                reason: format!("prox optimality violated at trial {trial}"),
            });
        }
    }
    Ok(())
}

/// Validates and wraps a custom prox function for use as a problem base.
pub fn register_custom_base(
    f: Arc<dyn ProxFunction>,
    dim: usize,
    seed: u64,
) -> Result<Arc<dyn ProxFunction>> {
    validate_prox_function(f.as_ref(), dim, seed)?;
    Ok(f)
}
