use std::sync::Arc;

use super::state::RunState;
use super::{Algorithm, Diagnostics, IterationRecord, OptimizerConfig, Phase};
use crate::acquisition::{select_next_setting, CenterBook};
use crate::error::{Error, Result};
use crate::pareto::hvi_set;
use crate::problems::Problem;
use crate::seeding::substream;
use crate::stopping::{conservative_stopping_epoch, should_stop};
use crate::surrogate::{trajectory_beliefs, GpModel};

pub(super) fn run<F>(problem: &Arc<Problem>, config: &OptimizerConfig, sink: &mut F) -> Result<()>
where
    F: FnMut(&IterationRecord) -> Result<()>,
{
    let mut st = RunState::new(problem, config);
    st.initialize(sink)?;
    let mut book = CenterBook::new(config.acquisition.gamma_max, config.acquisition.max_failures);
    for (id, x) in st.settings.iter().enumerate() {
        book.register(id, x.clone());
    }
    let early_stopping = config.algorithm != Algorithm::TmoboNes;
    for iteration in 1..=config.iterations {
        if st.budget_exhausted() {
            break;
        }
        let record = step(&mut st, &mut book, iteration, early_stopping).map_err(|e| {
            Error::AtIteration {
                iteration,
                source: Box::new(e),
            }
        })?;
        sink(&record)?;
    }
    Ok(())
}

fn step(
    st: &mut RunState<'_>,
    book: &mut CenterBook,
    iteration: usize,
    early_stopping: bool,
) -> Result<IterationRecord> {
    let config = st.config;
    let problem = st.problem;
    let models = st.fit()?;
    let mut rng = substream(st.seed(), "acquisition", iteration as u64);
    let (x, selection) = select_next_setting(
        &models,
        &st.archive,
        book,
        &st.settings,
        &config.acquisition,
        |c| problem.project(c),
        &mut rng,
        config.execution,
    )?;
    let id = st.add_setting(x.clone());
    let front = st.archive.front_values();
    let noise: Vec<f64> = models.iter().map(GpModel::noise_variance).collect();
    let mut beliefs = trajectory_beliefs(&models, &x);
    let mut reps = st.replicas(id);
    let mut obs = Vec::new();
    let mut truth = Vec::new();
    let mut stop_epoch = None;
    for t in 1..=st.t_max() {
        let (y, tr) = reps.observe()?;
        st.archive.update_front(id, t, y.clone());
        st.count(&tr);
        for (i, b) in beliefs.iter_mut().enumerate() {
            b.condition(t - 1, y[i], noise[i]);
        }
        obs.push(y);
        truth.push(tr);
        stop_epoch =
            conservative_stopping_epoch(&beliefs, &front, st.archive.reference(), &config.stopping);
        if early_stopping && should_stop(t, stop_epoch, config.stopping.inclusive) {
            break;
        }
        if st.budget_exhausted() {
            break;
        }
    }
    let improved = hvi_set(&obs, &front, st.archive.reference()) > 0.0;
    book.report_outcome(selection.center, improved)?;
    book.register(id, x);
    let kept = st.keep(&models, id, &obs);
    let diagnostics = Diagnostics::Trajectory {
        selection,
        stop_epoch,
        improved,
    };
    Ok(st.record(Phase::Search, iteration, id, obs, truth, kept, Some(diagnostics)))
}
