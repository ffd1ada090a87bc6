//! Fan-out of independent experiment configs across worker threads.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};

use crate::config::{ExperimentConfig, Overrides};
use crate::experiment::run_experiment;

pub struct SweepOutcome {
    pub config_path: PathBuf,
    pub result: Result<()>,
}

/// Runs every `*.json` config in `dir`, each writing into an isolated
/// subdirectory of its configured output dir named after the config file.
pub fn run_sweep(dir: &Path, workers: usize, overrides: &Overrides) -> Result<Vec<SweepOutcome>> {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read sweep directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        bail!("no *.json configs found in {}", dir.display());
    }

    let queue: Mutex<Vec<PathBuf>> = Mutex::new(configs);
    let outcomes: Mutex<Vec<SweepOutcome>> = Mutex::new(Vec::new());
    let workers = workers.max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let Some(path) = queue.lock().unwrap().pop() else {
                    break;
                };
                let result = run_one(&path, overrides);
                outcomes.lock().unwrap().push(SweepOutcome {
                    config_path: path,
                    result,
                });
            });
        }
    });

    let mut outcomes = outcomes.into_inner().unwrap();
    outcomes.sort_by(|a, b| a.config_path.cmp(&b.config_path));
    Ok(outcomes)
}

fn run_one(path: &Path, overrides: &Overrides) -> Result<()> {
    let mut config = ExperimentConfig::load(path)?;
    config.apply_overrides(overrides);
    config.apply_env();
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("config");
    config.output_dir = config.output_dir.join(stem);
    run_experiment(&config).map(|_| ())
}
