use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mmgmc_cli::config::{ExperimentConfig, Overrides};
use mmgmc_cli::csvio;
use mmgmc_cli::experiment::run_experiment;
use mmgmc_cli::sweep::run_sweep;
use mmgmc_cli::synth::{generate_synthetic, SyntheticSpec};
use mmgmc_cli::verify;

/// Solver harness for sparse least squares with generalized minimax-concave
/// penalties: majorization-minimization over shrinking balls.
#[derive(Parser)]
#[command(name = "mmgmc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the oracle cross-check suites on a config (N <= 3).
    Verify {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Generate a synthetic instance from a spec JSON and write its CSVs.
    Generate {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "output_dir", default_value = "out")]
        output_dir: PathBuf,
    },
    /// Run every *.json config in a directory as independent experiments.
    Sweep {
        dir: PathBuf,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get().min(4))
        .unwrap_or(1)
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Solve { config, overrides } => {
            let mut config = ExperimentConfig::load(&config)?;
            config.apply_overrides(&overrides);
            config.apply_env();
            let summary = run_experiment(&config)?;
            println!(
                "F_final = {:.12e} after {} iterations (min directional derivative {:.3e}, stationary: {})",
                summary.f_final,
                summary.iterations,
                summary.min_directional_derivative,
                summary.stationary
            );
            println!(
                "summary: {}",
                config.output_dir.join("summary.json").display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config, overrides } => {
            let mut config = ExperimentConfig::load(&config)?;
            config.apply_overrides(&overrides);
            config.apply_env();
            let rows = verify::verify(&config)?;
            verify::print_table(&rows);
            if verify::all_passed(&rows) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Generate {
            spec,
            seed,
            mut output_dir,
        } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("cannot read spec {}", spec.display()))?;
            let spec: SyntheticSpec = serde_json::from_str(&text)
                .with_context(|| format!("cannot parse spec {}", spec.display()))?;
            if let Ok(dir) = std::env::var("MMGMC_OUTPUT_DIR") {
                if !dir.is_empty() {
                    output_dir = PathBuf::from(dir);
                }
            }
            let instance = generate_synthetic(&spec, seed)?;
            std::fs::create_dir_all(&output_dir)
                .with_context(|| format!("cannot create {}", output_dir.display()))?;
            let a_path = output_dir.join("A.csv");
            let y_path = output_dir.join("y.csv");
            let x_path = output_dir.join("x_true.csv");
            csvio::write_matrix_csv(&a_path, &instance.matrix)?;
            csvio::write_vector_csv(&y_path, &instance.rhs)?;
            csvio::write_vector_csv(&x_path, &instance.x_true)?;
            println!("{}", a_path.display());
            println!("{}", y_path.display());
            println!("{}", x_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            dir,
            workers,
            overrides,
        } => {
            let outcomes = run_sweep(&dir, workers, &overrides)?;
            let mut failures = 0;
            for outcome in &outcomes {
                match &outcome.result {
                    Ok(()) => println!("OK      {}", outcome.config_path.display()),
                    Err(err) => {
                        failures += 1;
                        println!("FAILED  {}: {err:#}", outcome.config_path.display());
                    }
                }
            }
            println!("{} configs, {} failed", outcomes.len(), failures);
            if failures == 0 {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}
