//! Shrinking-ball majorization-minimization driver.
//!
//! Starting from `x0` with `||x0||_2 > 2 epsilon`, iteration `k` minimizes the
//! majorizer anchored at the current iterate over the ball of radius
//! `epsilon / 2^k`:
//!
//! ```text
//! x_{k+1} = argmin { F_M(x, x_k) : ||x - x_k|| <= epsilon / 2^k }
//! ```
//!
//! The halving schedule caps total travel at `2 epsilon`, which keeps the
//! iterates a Cauchy sequence and away from the origin, and the tangency of
//! the surrogate gives monotone descent of `F`. The loop stops once the ball
//! radius falls below a floor (the remaining movement is at most twice the
//! floor) or the outer budget runs out; a stationarity sweep over signed
//! coordinate and random unit directions is attached to the trace.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::inner::{minimize_majorizer_in_ball, InnerConfig};
use crate::linalg::{ensure_finite_vector, ensure_len};
use crate::model::{directional_derivative, evaluate_objective, ProblemInstance};
use crate::surrogate::{self, SurrogateParams};

/// How the minorizer curvature is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// Use the given curvature; refused unless its certificate passes.
    Manual(f64),
    /// Derive the smallest curvature certifying `a`-strong convexity.
    Auto { a: f64 },
}

/// Configuration of the outer MM loop.
#[derive(Debug, Clone)]
pub struct MMConfig {
    /// Initial ball radius `epsilon`.
    pub epsilon: f64,
    pub max_outer_iter: usize,
    /// Stop once the next ball radius `epsilon / 2^k` drops below this.
    pub radius_floor: f64,
    pub gamma_mode: GammaMode,
    /// Random unit directions sampled by the final stationarity sweep.
    pub stationarity_directions: usize,
    /// Seed for the stationarity sweep (the only randomness in a run).
    pub seed: u64,
    pub inner: InnerConfig,
}

impl MMConfig {
    /// Defaults: floor `1e-8 * epsilon`, 1000 outer iterations, 100 random
    /// stationarity directions, seed 0, default inner solver.
    pub fn new(epsilon: f64, gamma_mode: GammaMode) -> Self {
        Self {
            epsilon,
            max_outer_iter: 1000,
            radius_floor: 1e-8 * epsilon,
            gamma_mode,
            stationarity_directions: 100,
            seed: 0,
            inner: InnerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                requirement: "positive and finite",
                value: self.epsilon,
            });
        }
        if !(self.radius_floor > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius_floor",
                requirement: "positive",
                value: self.radius_floor,
            });
        }
        if self.max_outer_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_outer_iter",
                requirement: "at least 1",
                value: 0.0,
            });
        }
        if let GammaMode::Manual(g) = self.gamma_mode {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "gamma_m",
                    requirement: "nonnegative and finite",
                    value: g,
                });
            }
        }
        if let GammaMode::Auto { a } = self.gamma_mode {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "a",
                    requirement: "nonnegative and finite",
                    value: a,
                });
            }
        }
        self.inner.validate()
    }
}

/// One outer iteration of the trace: the iterate, its objective value, the
/// ball radius `epsilon / 2^k` centered on it, and inner-solver statistics
/// for the solve that produced it (zeros for `k = 0`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub radius: f64,
    pub x: Vec<f64>,
    #[serde(rename = "F")]
    pub objective: f64,
    pub inner_iters: usize,
    pub inner_converged: bool,
}

/// Full record of an MM run.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    pub stationarity: Option<StationarityReport>,
}

impl IterationTrace {
    /// Writes the trace as JSON Lines: one record per outer iteration and a
    /// final stationarity line when present.
    pub fn write_jsonl<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for rec in &self.records {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        if let Some(st) = &self.stationarity {
            let line = json!({
                "stationarity": {
                    "min_dd": st.min_directional_derivative,
                    "n_directions": st.n_directions,
                    "seed": st.seed,
                }
            });
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Result of sweeping directional derivatives at a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationarityReport {
    /// Smallest directional derivative found.
    pub min_directional_derivative: f64,
    /// Direction attaining the minimum.
    pub worst_direction: Vec<f64>,
    /// Number of random unit directions sampled (besides the 2N signed axes).
    pub n_directions: usize,
    pub seed: u64,
    /// `1e-6 * (1 + |F(x)|)`.
    pub tolerance: f64,
    /// True when the minimum exceeds `-tolerance`.
    pub stationary: bool,
}

/// Outcome of a single trace check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    /// Index of the first violating iteration, when failing.
    pub first_violation: Option<usize>,
}

/// Per-invariant verification of a trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    /// `F(x_k)` nonincreasing within 1e-10.
    pub monotone_descent: CheckOutcome,
    /// `||x_{k+1} - x_k|| <= epsilon / 2^k + 1e-9`.
    pub step_bounds: CheckOutcome,
    /// `||x_k|| >= ||x0|| - 2 epsilon - 1e-9`.
    pub origin_avoidance: CheckOutcome,
}

impl TraceReport {
    pub fn all_passed(&self) -> bool {
        self.monotone_descent.passed && self.step_bounds.passed && self.origin_avoidance.passed
    }
}

/// Runs the shrinking-ball MM iteration and returns the final iterate with
/// the full trace (stationarity sweep included).
pub fn run_mm(
    problem: &ProblemInstance,
    config: &MMConfig,
    x0: &DVector<f64>,
) -> Result<(DVector<f64>, IterationTrace)> {
    config.validate()?;
    ensure_len(x0, problem.dim(), "x0")?;
    ensure_finite_vector(x0, "x0")?;

    let x0_norm = x0.norm();
    if !(x0_norm > 2.0 * config.epsilon) {
        return Err(Error::InitializationTooClose {
            x0_norm,
            threshold: 2.0 * config.epsilon,
        });
    }

    let (gamma_m, strong_modulus) = match config.gamma_mode {
        GammaMode::Manual(g) => (g, 0.0),
        GammaMode::Auto { a } => (
            surrogate::minimal_gamma(problem.matrix(), problem.lambda(), problem.alpha(), a)?,
            a,
        ),
    };
    let cert = surrogate::certify_surrogate_convexity(
        problem.matrix(),
        problem.lambda(),
        problem.alpha(),
        gamma_m,
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

    let mut trace = IterationTrace::default();
    let mut x = x0.clone();
    let mut radius = config.epsilon;
    trace.records.push(IterationRecord {
        k: 0,
        radius,
        x: x.iter().copied().collect(),
        objective: evaluate_objective(problem, &x)?.total,
        inner_iters: 0,
        inner_converged: true,
    });

    let mut k = 0;
    loop {
        let params = SurrogateParams::with_modulus(gamma_m, x.clone(), strong_modulus)?;
        let inner = minimize_majorizer_in_ball(problem, &params, radius, &config.inner)?;
        x = inner.x_star.clone();
        k += 1;
        radius *= 0.5;
        trace.records.push(IterationRecord {
            k,
            radius,
            x: x.iter().copied().collect(),
            objective: evaluate_objective(problem, &x)?.total,
            inner_iters: inner.iterations,
            inner_converged: inner.converged,
        });
        if radius < config.radius_floor || k >= config.max_outer_iter {
            break;
        }
    }

    trace.stationarity = Some(stationarity_report(
        problem,
        &x,
        config.stationarity_directions,
        config.seed,
    )?);
    Ok((x, trace))
}

/// Verifies the three computable invariants of a trace against the stated
/// tolerances, reporting the first violating index per check.
pub fn check_trace_invariants(trace: &IterationTrace, epsilon: f64, x0_norm: f64) -> TraceReport {
    let records = &trace.records;

    let mut descent = CheckOutcome {
        passed: true,
        first_violation: None,
    };
    for i in 1..records.len() {
        if records[i].objective > records[i - 1].objective + 1e-10 {
            descent = CheckOutcome {
                passed: false,
                first_violation: Some(i),
            };
            break;
        }
    }

    let mut steps = CheckOutcome {
        passed: true,
        first_violation: None,
    };
    for i in 1..records.len() {
        let allowed = epsilon / 2f64.powi((i - 1) as i32);
        let step = step_norm(&records[i - 1].x, &records[i].x);
        if step > allowed + 1e-9 {
            steps = CheckOutcome {
                passed: false,
                first_violation: Some(i - 1),
            };
            break;
        }
    }

    let mut origin = CheckOutcome {
        passed: true,
        first_violation: None,
    };
    let floor = x0_norm - 2.0 * epsilon - 1e-9;
    for (i, rec) in records.iter().enumerate() {
        let norm = rec.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < floor {
            origin = CheckOutcome {
                passed: false,
                first_violation: Some(i),
            };
            break;
        }
    }

    TraceReport {
        monotone_descent: descent,
        step_bounds: steps,
        origin_avoidance: origin,
    }
}

/// Verifies the geometric tail bound `||x_m - x_k|| <= 2 epsilon / 2^k + 1e-9`
/// for every pair `k < m`, the computable content of the convergence claim.
pub fn check_cauchy_property(trace: &IterationTrace, epsilon: f64) -> CheckOutcome {
    let records = &trace.records;
    for k in 0..records.len() {
        let allowed = 2.0 * epsilon / 2f64.powi(k as i32) + 1e-9;
        for m in (k + 1)..records.len() {
            if step_norm(&records[k].x, &records[m].x) > allowed {
                return CheckOutcome {
                    passed: false,
                    first_violation: Some(k),
                };
            }
        }
    }
    CheckOutcome {
        passed: true,
        first_violation: None,
    }
}

fn step_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sweeps directional derivatives of `F` at `x` over all `2N` signed
/// coordinate directions plus `n_directions` seeded random unit vectors,
/// reporting the minimum and the direction attaining it. The point is flagged
/// stationary when the minimum exceeds `-1e-6 (1 + |F(x)|)`.
pub fn stationarity_report(
    problem: &ProblemInstance,
    x: &DVector<f64>,
    n_directions: usize,
    seed: u64,
) -> Result<StationarityReport> {
    let n = problem.dim();
    let mut min_dd = f64::INFINITY;
    let mut worst = DVector::zeros(n);

    let consider = |d: DVector<f64>, min_dd: &mut f64, worst: &mut DVector<f64>| -> Result<()> {
        let dd = directional_derivative(problem, x, &d)?;
        if dd < *min_dd {
            *min_dd = dd;
            *worst = d;
        }
        Ok(())
    };

    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut d = DVector::zeros(n);
            d[i] = sign;
            consider(d, &mut min_dd, &mut worst)?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_directions {
        let mut d: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm = d.norm();
        if norm < 1e-12 {
            d[0] = 1.0;
        } else {
            d /= norm;
        }
        consider(d, &mut min_dd, &mut worst)?;
    }

    let f_val = evaluate_objective(problem, x)?.total;
    let tolerance = 1e-6 * (1.0 + f_val.abs());
    Ok(StationarityReport {
        min_directional_derivative: min_dd,
        worst_direction: worst.iter().copied().collect(),
        n_directions,
        seed,
        tolerance,
        stationary: min_dd >= -tolerance,
    })
}
