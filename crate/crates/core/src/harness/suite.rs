//! Running every (problem, optimizer, trial) cell of an experiment.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::trial::{read_trial, TrialData, TrialHeader, TrialWriter};
use crate::error::{Error, Result};
use crate::optimizers::{run_with, Algorithm};
use crate::problems::{Problem, ProblemSpec};
use crate::seeding::trial_seed;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pending,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub problem: String,
    pub label: String,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub seed: u64,
    /// Relative to the output directory.
    pub file: PathBuf,
    pub status: CellStatus,
    #[serde(default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub code_version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellEntry>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join(MANIFEST))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn save(&self, dir: &Path) -> Result<()> {
        let tmp = dir.join(format!("{MANIFEST}.tmp"));
        std::fs::write(&tmp, serde_json::to_vec_pretty(self)?)?;
        std::fs::rename(tmp, dir.join(MANIFEST))?;
        Ok(())
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

struct Cell {
    index: usize,
    spec: ProblemSpec,
    pair: usize,
}

fn plan(config: &ExperimentConfig) -> Result<(Vec<CellEntry>, Vec<Cell>)> {
    let mut entries = Vec::new();
    let mut cells = Vec::new();
    for (p, pair) in config.runs.iter().enumerate() {
        let spec = pair.problem.resolve()?;
        let label = pair.label();
        for trial in 0..config.trials {
            let seed = trial_seed(
                config.master_seed,
                &spec.name,
                pair.optimizer.algorithm.label(),
                trial,
            );
            let file = PathBuf::from("trials")
                .join(sanitize(&spec.name))
                .join(sanitize(&label))
                .join(format!("trial_{trial:03}.jsonl"));
            cells.push(Cell {
                index: entries.len(),
                spec: spec.clone(),
                pair: p,
            });
            entries.push(CellEntry {
                problem: spec.name.clone(),
                label: label.clone(),
                algorithm: pair.optimizer.algorithm,
                trial,
                seed,
                file,
                status: CellStatus::Pending,
                error: None,
            });
        }
    }
    Ok((entries, cells))
}

/// Outcome counts of one suite invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteSummary {
    pub completed: usize,
    pub skipped: usize,
    pub failed: usize,
}

/// Runs every cell, writing one trial file each and keeping the manifest
/// current after every cell. With `resume`, cells already marked done
/// (and whose files exist) are skipped. Cell failures are recorded and do
/// not stop the suite.
pub fn run_suite(config: &ExperimentConfig, resume: bool) -> Result<SuiteSummary> {
    config.validate()?;
    let dir = config.output_dir.clone();
    std::fs::create_dir_all(&dir)?;
    let (mut entries, cells) = plan(config)?;
    if resume {
        if let Ok(previous) = Manifest::load(&dir) {
            for e in &mut entries {
                let done = previous.cells.iter().any(|p| {
                    p.status == CellStatus::Done
                        && p.problem == e.problem
                        && p.label == e.label
                        && p.trial == e.trial
                        && p.seed == e.seed
                });
                if done && dir.join(&e.file).exists() {
                    e.status = CellStatus::Done;
                }
            }
        }
    }
    let skipped = entries.iter().filter(|e| e.status == CellStatus::Done).count();
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        cells: entries,
    };
    manifest.save(&dir)?;
    let todo: Vec<&Cell> = cells
        .iter()
        .filter(|c| manifest.cells[c.index].status != CellStatus::Done)
        .collect();
    let shared = Mutex::new(manifest);

    let work = |cell: &Cell| -> Result<()> {
        let entry = shared.lock().expect("manifest lock").cells[cell.index].clone();
        let outcome = run_cell(config, cell, &entry, &dir);
        let mut m = shared.lock().expect("manifest lock");
        let e = &mut m.cells[cell.index];
        match outcome {
            Ok(()) => e.status = CellStatus::Done,
            Err(err) => {
                e.status = CellStatus::Failed;
                e.error = Some(err.to_string());
            }
        }
        m.save(&dir)
    };
    run_pool(config.workers, &todo, work)?;

    let m = shared.into_inner().expect("manifest lock");
    let failed = m.cells.iter().filter(|e| e.status == CellStatus::Failed).count();
    let done = m.cells.iter().filter(|e| e.status == CellStatus::Done).count();
    Ok(SuiteSummary {
        completed: done - skipped,
        skipped,
        failed,
    })
}

#[cfg(feature = "parallel")]
fn run_pool<F>(workers: usize, todo: &[&Cell], work: F) -> Result<()>
where
    F: Fn(&Cell) -> Result<()> + Sync,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return todo.iter().try_for_each(|c| work(c));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Harness(e.to_string()))?;
    pool.install(|| todo.par_iter().try_for_each(|c| work(c)))
}

#[cfg(not(feature = "parallel"))]
fn run_pool<F>(_workers: usize, todo: &[&Cell], work: F) -> Result<()>
where
    F: Fn(&Cell) -> Result<()> + Sync,
{
    todo.iter().try_for_each(|c| work(c))
}

fn run_cell(config: &ExperimentConfig, cell: &Cell, entry: &CellEntry, dir: &Path) -> Result<()> {
    let problem = Arc::new(Problem::new(cell.spec.clone())?);
    let mut optimizer = config.runs[cell.pair].optimizer.clone();
    optimizer.seed = entry.seed;
    let header = TrialHeader {
        problem: entry.problem.clone(),
        label: entry.label.clone(),
        trial: entry.trial,
        seed: entry.seed,
        metadata: crate::optimizers::RunMetadata {
            algorithm: optimizer.algorithm,
            problem: cell.spec.clone(),
            config: optimizer.clone(),
            seed: entry.seed,
        },
    };
    let path = dir.join(&entry.file);
    let tmp = path.with_extension("jsonl.partial");
    let mut writer = TrialWriter::create(&tmp, &header)?;
    run_with(&problem, &optimizer, |r| writer.push(r))?;
    writer.finish()?;
    std::fs::rename(&tmp, &path)?;
    Ok(())
}

/// Every completed trial listed in the manifest under `dir`, in manifest
/// order.
pub fn load_results(dir: &Path) -> Result<Vec<TrialData>> {
    let manifest = Manifest::load(dir).map_err(|e| {
        Error::Harness(format!("{}: cannot read manifest: {e}", dir.display()))
    })?;
    manifest
        .cells
        .iter()
        .filter(|c| c.status == CellStatus::Done)
        .map(|c| read_trial(&dir.join(&c.file)))
        .collect()
}
