//! Experiment configuration: one JSON document, with CLI flags overriding
//! individual fields (flag names mirror config paths, e.g. `--mm.epsilon`).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mmgmc::nalgebra::DVector;
use mmgmc::{BaseFunction, GammaMode, InnerConfig, MMConfig, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::synth::{generate_synthetic, SyntheticSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub lambda: f64,
    pub alpha: f64,
    #[serde(default)]
    pub base: BaseSpec,
    #[serde(default)]
    pub mm: MmSection,
    #[serde(default)]
    pub inner: InnerConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Optional CSV with the initial point; defaults to a seeded random unit
    /// vector scaled to `4 * epsilon`.
    #[serde(default)]
    pub x0_csv: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub emit_x_final: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSource {
    Files {
        matrix_csv: PathBuf,
        rhs_csv: PathBuf,
    },
    Synthetic {
        synthetic: SyntheticSpec,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<f64>>,
}

impl Default for BaseSpec {
    fn default() -> Self {
        Self {
            name: "l1".into(),
            scale: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MmSection {
    pub epsilon: f64,
    pub max_outer_iter: usize,
    /// Defaults to `1e-8 * epsilon` when absent.
    pub radius_floor: Option<f64>,
    pub gamma: GammaMode,
    pub stationarity_directions: usize,
}

impl Default for MmSection {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            max_outer_iter: 1000,
            radius_floor: None,
            gamma: GammaMode::Auto { a: 0.05 },
            stationarity_directions: 100,
        }
    }
}

/// CLI flag overrides; names mirror config paths.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "output_dir")]
    pub output_dir: Option<PathBuf>,
    #[arg(long = "base.name")]
    pub base_name: Option<String>,
    #[arg(long = "mm.epsilon")]
    pub mm_epsilon: Option<f64>,
    #[arg(long = "mm.max_outer_iter")]
    pub mm_max_outer_iter: Option<usize>,
    #[arg(long = "mm.radius_floor")]
    pub mm_radius_floor: Option<f64>,
    #[arg(long = "mm.stationarity_directions")]
    pub mm_stationarity_directions: Option<usize>,
    #[arg(long = "mm.gamma.manual", conflicts_with = "mm_gamma_auto_a")]
    pub mm_gamma_manual: Option<f64>,
    #[arg(long = "mm.gamma.auto.a")]
    pub mm_gamma_auto_a: Option<f64>,
    #[arg(long = "inner.tol_inner")]
    pub inner_tol_inner: Option<f64>,
    #[arg(long = "inner.max_inner_iter")]
    pub inner_max_inner_iter: Option<usize>,
    #[arg(long = "inner.dykstra_iter")]
    pub inner_dykstra_iter: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: Self = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(config)
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) {
        if let Some(v) = ov.lambda {
            self.lambda = v;
        }
        if let Some(v) = ov.alpha {
            self.alpha = v;
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = &ov.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = &ov.base_name {
            self.base.name = v.clone();
        }
        if let Some(v) = ov.mm_epsilon {
            self.mm.epsilon = v;
        }
        if let Some(v) = ov.mm_max_outer_iter {
            self.mm.max_outer_iter = v;
        }
        if let Some(v) = ov.mm_radius_floor {
            self.mm.radius_floor = Some(v);
        }
        if let Some(v) = ov.mm_stationarity_directions {
            self.mm.stationarity_directions = v;
        }
        if let Some(v) = ov.mm_gamma_manual {
            self.mm.gamma = GammaMode::Manual(v);
        }
        if let Some(v) = ov.mm_gamma_auto_a {
            self.mm.gamma = GammaMode::Auto { a: v };
        }
        if let Some(v) = ov.inner_tol_inner {
            self.inner.tol_inner = v;
        }
        if let Some(v) = ov.inner_max_inner_iter {
            self.inner.max_inner_iter = v;
        }
        if let Some(v) = ov.inner_dykstra_iter {
            self.inner.dykstra_iter = v;
        }
    }

    /// Applies the `MMGMC_OUTPUT_DIR` environment override.
    pub fn apply_env(&mut self) {
        if let Ok(dir) = std::env::var("MMGMC_OUTPUT_DIR") {
            if !dir.is_empty() {
                self.output_dir = PathBuf::from(dir);
            }
        }
    }

    pub fn base_function(&self) -> Result<BaseFunction> {
        BaseFunction::from_name(&self.base.name, self.base.scale.as_deref())
            .context("invalid base function in config")
    }

    pub fn mm_config(&self) -> MMConfig {
        MMConfig {
            epsilon: self.mm.epsilon,
            max_outer_iter: self.mm.max_outer_iter,
            radius_floor: self.mm.radius_floor.unwrap_or(1e-8 * self.mm.epsilon),
            gamma_mode: self.mm.gamma,
            stationarity_directions: self.mm.stationarity_directions,
            seed: self.seed,
            inner: self.inner,
        }
    }

    /// Builds the problem instance, generating or loading data as configured.
    /// Returns the ground truth when the source is synthetic.
    pub fn load_problem(&self) -> Result<(ProblemInstance, Option<DVector<f64>>)> {
        let base = self.base_function()?;
        match &self.problem {
            ProblemSource::Files {
                matrix_csv,
                rhs_csv,
            } => {
                if !matrix_csv.exists() {
                    bail!("matrix_csv does not exist: {}", matrix_csv.display());
                }
                if !rhs_csv.exists() {
                    bail!("rhs_csv does not exist: {}", rhs_csv.display());
                }
                let a = csvio::read_matrix_csv(matrix_csv)?;
                let y = csvio::read_vector_csv(rhs_csv)?;
                if y.len() != a.nrows() {
                    bail!(
                        "dimension mismatch: {} has {} rows but {} has {} entries",
                        matrix_csv.display(),
                        a.nrows(),
                        rhs_csv.display(),
                        y.len()
                    );
                }
                let p = ProblemInstance::new(a, y, self.lambda, self.alpha, base)?;
                Ok((p, None))
            }
            ProblemSource::Synthetic { synthetic } => {
                let inst = generate_synthetic(synthetic, self.seed)?;
                let p = ProblemInstance::new(inst.matrix, inst.rhs, self.lambda, self.alpha, base)?;
                Ok((p, Some(inst.x_true)))
            }
        }
    }
}
