//! Optimizer loops: the trajectory-based optimizer with its variants and
//! three baselines that score joint `(setting, epoch)` candidates.

mod baselines;
mod state;
mod tmobo;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use baselines::{expected_improvement, scalarize_tchebycheff};

use crate::acquisition::{AcquisitionConfig, SelectionDiagnostics};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::problems::{Problem, ProblemSpec};
use crate::stopping::StoppingConfig;
use crate::surrogate::FitConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Tmobo,
    /// Without early stopping.
    TmoboNes,
    /// Replicated training, averaged per epoch.
    TmoboP,
    ParegoT,
    EhviT,
    RandomT,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Tmobo,
        Algorithm::TmoboNes,
        Algorithm::TmoboP,
        Algorithm::ParegoT,
        Algorithm::EhviT,
        Algorithm::RandomT,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Tmobo => "tmobo",
            Algorithm::TmoboNes => "tmobo_nes",
            Algorithm::TmoboP => "tmobo_p",
            Algorithm::ParegoT => "parego_t",
            Algorithm::EhviT => "ehvi_t",
            Algorithm::RandomT => "random_t",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.label() == s)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    /// Initial settings; `2(d + 1)` when absent.
    pub initial_settings: Option<usize>,
    pub acquisition: AcquisitionConfig,
    pub stopping: StoppingConfig,
    pub fit: FitConfig,
    /// Replicated sessions per setting (`tmobo_p` only).
    pub replications: usize,
    pub iterations: usize,
    /// Search-phase epoch budget.
    pub epoch_budget: Option<usize>,
    /// Joint candidates per `d + 1` for the baselines.
    pub baseline_candidates_per_dim: usize,
    pub tchebycheff_rho: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Tmobo,
            initial_settings: None,
            acquisition: AcquisitionConfig::default(),
            stopping: StoppingConfig::default(),
            fit: FitConfig::default(),
            replications: 1,
            iterations: 50,
            epoch_budget: None,
            baseline_candidates_per_dim: 100,
            tchebycheff_rho: 0.05,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn new(algorithm: Algorithm, iterations: usize, seed: u64) -> Self {
        Self {
            algorithm,
            iterations,
            seed,
            ..Self::default()
        }
    }

    pub fn initial_count(&self, d: usize) -> usize {
        self.initial_settings.unwrap_or(2 * (d + 1))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.initial_settings == Some(0) {
            return fail("initial_settings must be at least 1");
        }
        if self.replications == 0 {
            return fail("replications must be at least 1");
        }
        if self.replications > 1 && self.algorithm != Algorithm::TmoboP {
            return fail("replications > 1 requires the tmobo_p algorithm");
        }
        if self.acquisition.mc_samples == 0 || self.acquisition.candidates_per_dim == 0 {
            return fail("mc_samples and candidates_per_dim must be at least 1");
        }
        if self.acquisition.gamma_max.is_nan() || self.acquisition.gamma_max <= 0.0 {
            return fail("gamma_max must be positive");
        }
        if self.stopping.beta.is_nan() || self.stopping.beta <= 0.0 {
            return fail("beta must be positive");
        }
        if self.stopping.augmentation_cap == 0 {
            return fail("augmentation_cap must be at least 1");
        }
        if self.epoch_budget == Some(0) {
            return fail("epoch_budget must be positive");
        }
        if self.baseline_candidates_per_dim == 0 {
            return fail("baseline_candidates_per_dim must be at least 1");
        }
        if self.tchebycheff_rho.is_nan() || self.tchebycheff_rho < 0.0 {
            return fail("tchebycheff_rho must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Init,
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostics {
    Trajectory {
        selection: SelectionDiagnostics,
        /// Predicted stopping epoch after the last observed epoch.
        stop_epoch: Option<usize>,
        improved: bool,
    },
    Joint {
        /// Requested epoch of the chosen candidate.
        epoch: usize,
        score: f64,
    },
}

/// One trained setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub phase: Phase,
    /// 1-based for the search phase, 0 for initialization.
    pub iteration: usize,
    pub setting_id: usize,
    pub setting: Vec<f64>,
    /// Epochs trained, `t'`.
    pub epochs: usize,
    /// What the optimizer observed, `observations[t - 1]`.
    pub observations: Vec<Vec<f64>>,
    /// Noise-free values at the same epochs, when the problem has them.
    pub truth: Vec<Vec<f64>>,
    /// Epochs that entered the surrogate's training data.
    pub kept_epochs: Vec<usize>,
    /// Hypervolume of the optimizer's own front under its own reference.
    pub hypervolume: f64,
    pub cumulative_epochs: usize,
    pub cumulative_cost: f64,
    pub diagnostics: Option<Diagnostics>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub algorithm: Algorithm,
    pub problem: ProblemSpec,
    pub config: OptimizerConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub metadata: RunMetadata,
    pub records: Vec<IterationRecord>,
}

impl RunRecord {
    pub fn search_records(&self) -> impl Iterator<Item = &IterationRecord> {
        self.records.iter().filter(|r| r.phase == Phase::Search)
    }

    pub fn total_epochs(&self) -> usize {
        self.records.last().map_or(0, |r| r.cumulative_epochs)
    }
}

/// Runs `config.algorithm` on `problem`, handing each record to `sink` as
/// soon as it exists.
pub fn run_with<F>(problem: &Arc<Problem>, config: &OptimizerConfig, mut sink: F) -> Result<RunMetadata>
where
    F: FnMut(&IterationRecord) -> Result<()>,
{
    config.validate()?;
    if config.algorithm == Algorithm::TmoboP && problem.feasible_settings().is_some() {
        // Tabular trajectories carry no noise to average away.
        if config.replications > 1 {
            return Err(Error::Unsupported(
                "replicated training on a tabular problem".into(),
            ));
        }
    }
    let metadata = RunMetadata {
        algorithm: config.algorithm,
        problem: problem.spec().clone(),
        config: config.clone(),
        seed: config.seed,
    };
    match config.algorithm {
        Algorithm::Tmobo | Algorithm::TmoboNes | Algorithm::TmoboP => {
            tmobo::run(problem, config, &mut sink)?
        }
        Algorithm::ParegoT | Algorithm::EhviT | Algorithm::RandomT => {
            baselines::run(problem, config, &mut sink)?
        }
    }
    Ok(metadata)
}

/// Runs to completion and collects every record.
pub fn run(problem: &Arc<Problem>, config: &OptimizerConfig) -> Result<RunRecord> {
    let mut records = Vec::new();
    let metadata = run_with(problem, config, |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok(RunRecord { metadata, records })
}
