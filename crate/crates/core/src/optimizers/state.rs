use std::sync::Arc;
use std::time::Instant;

use super::{Diagnostics, IterationRecord, OptimizerConfig, Phase};
use crate::error::{Error, Result};
use crate::pareto::ParetoArchive;
use crate::problems::{Problem, TrainingSession};
use crate::seeding::substream_seed;
use crate::sobol::sobol_init;
use crate::stopping::select_augmentation_subset;
use crate::surrogate::{fit_models, GpModel, KernelSpec, QueryPair, TemporalKind};

/// `P` synchronized sessions of one setting, reported as their average.
pub(super) struct Replicas {
    sessions: Vec<TrainingSession>,
}

impl Replicas {
    /// One more epoch: mean of the noisy observations and the noise-free
    /// values.
    pub fn observe(&mut self) -> Result<(Vec<f64>, Vec<f64>)> {
        let p = self.sessions.len() as f64;
        let mut mean: Vec<f64> = Vec::new();
        let mut truth = Vec::new();
        for s in &mut self.sessions {
            let o = s.observe_epoch()?;
            if mean.is_empty() {
                mean = vec![0.0; o.values.len()];
                truth = o.truth;
            }
            for (m, v) in mean.iter_mut().zip(&o.values) {
                *m += v;
            }
        }
        if p > 1.0 {
            for m in &mut mean {
                *m /= p;
            }
        }
        Ok((mean, truth))
    }
}

/// Everything an optimizer loop carries between iterations.
pub(super) struct RunState<'a> {
    pub problem: &'a Arc<Problem>,
    pub config: &'a OptimizerConfig,
    pub archive: ParetoArchive,
    pub settings: Vec<Vec<f64>>,
    pub inputs: Vec<QueryPair>,
    /// `targets[i]` holds objective `i` for every input.
    pub targets: Vec<Vec<f64>>,
    pub kinds: Vec<TemporalKind>,
    warm: Option<Vec<KernelSpec>>,
    pub epochs: usize,
    pub cost: f64,
    started: Instant,
}

impl<'a> RunState<'a> {
    pub fn new(problem: &'a Arc<Problem>, config: &'a OptimizerConfig) -> Self {
        let k = problem.k();
        let kinds = (0..k)
            .map(|i| TemporalKind::for_objective(problem.spec().objective_kind(i)))
            .collect();
        Self {
            problem,
            config,
            archive: ParetoArchive::new(k),
            settings: Vec::new(),
            inputs: Vec::new(),
            targets: vec![Vec::new(); k],
            kinds,
            warm: None,
            epochs: 0,
            cost: 0.0,
            started: Instant::now(),
        }
    }

    pub fn d(&self) -> usize {
        self.problem.d()
    }

    pub fn t_max(&self) -> usize {
        self.problem.t_max()
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }

    pub fn budget_exhausted(&self) -> bool {
        self.config
            .epoch_budget
            .is_some_and(|b| self.epochs >= b)
    }

    pub fn add_setting(&mut self, x: Vec<f64>) -> usize {
        self.settings.push(x);
        self.settings.len() - 1
    }

    pub fn replicas(&self, setting: usize) -> Replicas {
        let base = substream_seed(self.seed(), "noise", setting as u64);
        let sessions = (0..self.config.replications.max(1))
            .map(|p| {
                let seed = substream_seed(base, "replicate", p as u64);
                self.problem
                    .start_session(self.settings[setting].clone(), seed)
            })
            .collect();
        Replicas { sessions }
    }

    /// Books one search-phase epoch.
    pub fn count(&mut self, truth: &[f64]) {
        self.epochs += 1;
        self.cost += match self.problem.spec().cost_objective {
            Some(c) => truth[c],
            None => 1.0,
        };
    }

    pub fn prior_models(&self) -> Vec<GpModel> {
        self.kinds
            .iter()
            .map(|k| GpModel::prior(KernelSpec::default_for(self.d(), *k), self.t_max()))
            .collect()
    }

    /// Refits every objective's GP on the current data.
    pub fn fit(&mut self) -> Result<Vec<GpModel>> {
        let models = fit_models(
            &self.inputs,
            &self.targets,
            self.t_max(),
            &self.kinds,
            self.warm.as_deref(),
            &self.config.fit,
            self.config.execution,
        )?;
        self.warm = Some(models.iter().map(|m| m.spec().clone()).collect());
        Ok(models)
    }

    /// Picks the epochs of a trajectory that enter the training data and
    /// stores them. Returns the kept epochs in ascending order.
    pub fn keep(&mut self, models: &[GpModel], setting: usize, observations: &[Vec<f64>]) -> Vec<usize> {
        let x = &self.settings[setting];
        let zs: Vec<QueryPair> = (1..=observations.len())
            .map(|t| QueryPair::new(x.clone(), t))
            .collect();
        let mut picks = select_augmentation_subset(
            models,
            &zs,
            observations,
            self.config.stopping.augmentation_cap,
        );
        picks.sort_unstable();
        for &j in &picks {
            self.inputs.push(zs[j].clone());
            for (i, target) in self.targets.iter_mut().enumerate() {
                target.push(observations[j][i]);
            }
        }
        picks.iter().map(|j| j + 1).collect()
    }

    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &self,
        phase: Phase,
        iteration: usize,
        setting: usize,
        observations: Vec<Vec<f64>>,
        truth: Vec<Vec<f64>>,
        kept_epochs: Vec<usize>,
        diagnostics: Option<Diagnostics>,
    ) -> IterationRecord {
        IterationRecord {
            phase,
            iteration,
            setting_id: setting,
            setting: self.settings[setting].clone(),
            epochs: observations.len(),
            observations,
            truth,
            kept_epochs,
            hypervolume: self.archive.hypervolume(),
            cumulative_epochs: self.epochs,
            cumulative_cost: self.cost,
            diagnostics,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        }
    }

    /// Trains the Sobol initial design to `t_max` and keeps a capped subset
    /// of each trajectory, chosen under the prior.
    pub fn initialize<F>(&mut self, sink: &mut F) -> Result<()>
    where
        F: FnMut(&IterationRecord) -> Result<()>,
    {
        let n0 = self.config.initial_count(self.d());
        let design = sobol_init(n0, self.d(), substream_seed(self.seed(), "init", 0))?;
        let prior = self.prior_models();
        for x in design {
            let x = self.problem.project(&x);
            let id = self.add_setting(x);
            let mut reps = self.replicas(id);
            let mut obs = Vec::with_capacity(self.t_max());
            let mut truth = Vec::with_capacity(self.t_max());
            for t in 1..=self.t_max() {
                let (y, tr) = reps
                    .observe()
                    .map_err(|e| Error::AtIteration {
                        iteration: 0,
                        source: Box::new(e),
                    })?;
                self.archive.update_front(id, t, y.clone());
                obs.push(y);
                truth.push(tr);
            }
            let kept = self.keep(&prior, id, &obs);
            let rec = self.record(Phase::Init, 0, id, obs, truth, kept, None);
            sink(&rec)?;
        }
        Ok(())
    }
}
