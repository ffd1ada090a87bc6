//! Experiment execution: certificates, the MM run, and report emission.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use mmgmc::nalgebra::DVector;
use mmgmc::{
    certify_objective_convexity, certify_strong_convexity, certify_surrogate_convexity,
    minimal_gamma, oracle, run_mm, ConvexityCertificate, GammaMode, ProblemInstance,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::csvio;

#[derive(Debug, Serialize, Deserialize)]
pub struct Certificates {
    pub objective: ConvexityCertificate,
    pub surrogate: ConvexityCertificate,
    pub strong_convexity: ConvexityCertificate,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GammaReport {
    pub gamma_m: f64,
    pub strong_modulus: f64,
    /// `lambda * gamma_m`, reported alongside the modulus for diagnostics.
    pub lambda_times_gamma_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LassoAgreement {
    pub ista_objective: f64,
    pub mm_objective: f64,
    pub abs_gap: f64,
    pub support_match: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub certificates: Certificates,
    pub gamma: GammaReport,
    #[serde(rename = "F_final")]
    pub f_final: f64,
    pub iterations: usize,
    pub min_directional_derivative: f64,
    pub stationary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lasso_agreement: Option<LassoAgreement>,
    pub trace_jsonl: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_final_csv: Option<PathBuf>,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
}

/// Default initial point: seeded random unit vector scaled to `4 * epsilon`,
/// comfortably clearing the `||x0|| > 2 epsilon` rule.
pub fn default_x0(n: usize, epsilon: f64, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    loop {
        let d: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm = d.norm();
        if norm > 1e-9 {
            return d * (4.0 * epsilon / norm);
        }
    }
}

pub fn resolve_x0(config: &ExperimentConfig, problem: &ProblemInstance) -> Result<DVector<f64>> {
    match &config.x0_csv {
        Some(path) => csvio::read_vector_csv(path),
        None => Ok(default_x0(problem.dim(), config.mm.epsilon, config.seed)),
    }
}

/// Runs the configured experiment and writes `trace.jsonl`, `summary.json`
/// and (optionally) `x_final.csv` into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Summary> {
    let started = Instant::now();
    let (problem, _x_true) = config.load_problem()?;
    let mm = config.mm_config();

    let gamma_m = match mm.gamma_mode {
        GammaMode::Manual(g) => g,
        GammaMode::Auto { a } => {
            minimal_gamma(problem.matrix(), problem.lambda(), problem.alpha(), a)?
        }
    };
    let strong_modulus = match mm.gamma_mode {
        GammaMode::Manual(_) => 0.0,
        GammaMode::Auto { a } => a,
    };
    let certificates = Certificates {
        objective: certify_objective_convexity(
            problem.matrix(),
            problem.lambda(),
            problem.alpha(),
        )?,
        surrogate: certify_surrogate_convexity(
            problem.matrix(),
            problem.lambda(),
            problem.alpha(),
            gamma_m,
        )?,
        strong_convexity: certify_strong_convexity(
            problem.matrix(),
            problem.lambda(),
            problem.alpha(),
            gamma_m,
            strong_modulus,
        )?,
    };

    let x0 = resolve_x0(config, &problem)?;
    let (x_final, trace) = run_mm(&problem, &mm, &x0)?;
    let stationarity = trace
        .stationarity
        .as_ref()
        .expect("run_mm always attaches a stationarity report");

    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("cannot create {}", config.output_dir.display()))?;
    let trace_path = config.output_dir.join("trace.jsonl");
    let file = std::fs::File::create(&trace_path)
        .with_context(|| format!("cannot write {}", trace_path.display()))?;
    trace.write_jsonl(std::io::BufWriter::new(file))?;

    let x_final_path = if config.emit_x_final {
        let path = config.output_dir.join("x_final.csv");
        csvio::write_vector_csv(&path, &x_final)?;
        Some(path)
    } else {
        None
    };

    // The zero base reduces the objective to the lasso; record agreement
    // with the independent ISTA oracle.
    let lasso_agreement = if problem.base().name() == "zero" && problem.lambda() > 0.0 {
        match oracle::ista_lasso(
            problem.matrix(),
            problem.rhs(),
            problem.lambda(),
            1e-10,
            500_000,
        ) {
            Ok(ista) => {
                let lasso_obj = |x: &DVector<f64>| {
                    0.5 * (problem.rhs() - problem.matrix() * x).norm_squared()
                        + problem.lambda() * x.iter().map(|v| v.abs()).sum::<f64>()
                };
                let support =
                    |x: &DVector<f64>| -> Vec<bool> { x.iter().map(|v| v.abs() > 1e-8).collect() };
                let ista_objective = lasso_obj(&ista);
                let mm_objective = lasso_obj(&x_final);
                Some(LassoAgreement {
                    ista_objective,
                    mm_objective,
                    abs_gap: (ista_objective - mm_objective).abs(),
                    support_match: support(&ista) == support(&x_final),
                })
            }
            Err(_) => None,
        }
    } else {
        None
    };

    let summary = Summary {
        certificates,
        gamma: GammaReport {
            gamma_m,
            strong_modulus,
            lambda_times_gamma_m: problem.lambda() * gamma_m,
        },
        f_final: trace.records.last().expect("nonempty trace").objective,
        iterations: trace.records.len() - 1,
        min_directional_derivative: stationarity.min_directional_derivative,
        stationary: stationarity.stationary,
        lasso_agreement,
        trace_jsonl: trace_path,
        x_final_csv: x_final_path,
        wall_time: started.elapsed().as_secs_f64(),
    };

    let summary_path = config.output_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)?;
    std::fs::write(&summary_path, text + "\n")
        .with_context(|| format!("cannot write {}", summary_path.display()))?;
    Ok(summary)
}
