use std::sync::Arc;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use statrs::function::erf::erfc;

use super::state::RunState;
use super::{Algorithm, Diagnostics, IterationRecord, OptimizerConfig, Phase};
use crate::error::{Error, Result};
use crate::par::{argmax, map_indexed};
use crate::pareto::HvContext;
use crate::problems::Problem;
use crate::seeding::substream;
use crate::surrogate::{fit_gp, GpModel, KernelSpec, QueryPair, TemporalKind};

/// `max_i λ_i y_i + ρ Σ_i λ_i y_i`
pub fn scalarize_tchebycheff(y: &[f64], weights: &[f64], rho: f64) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for (v, w) in y.iter().zip(weights) {
        max = max.max(w * v);
        sum += w * v;
    }
    max + rho * sum
}

/// Expected improvement below `best` of a normal with mean `mu` and
/// standard deviation `sd`.
pub fn expected_improvement(mu: f64, sd: f64, best: f64) -> f64 {
    let gap = best - mu;
    if sd <= 0.0 {
        return gap.max(0.0);
    }
    let z = gap / sd;
    let cdf = 0.5 * erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (gap * cdf + sd * pdf).max(0.0)
}

pub(super) fn run<F>(problem: &Arc<Problem>, config: &OptimizerConfig, sink: &mut F) -> Result<()>
where
    F: FnMut(&IterationRecord) -> Result<()>,
{
    let mut st = RunState::new(problem, config);
    st.initialize(sink)?;
    let mut scalar_warm: Option<KernelSpec> = None;
    for iteration in 1..=config.iterations {
        if st.budget_exhausted() {
            break;
        }
        let record = step(&mut st, iteration, &mut scalar_warm).map_err(|e| Error::AtIteration {
            iteration,
            source: Box::new(e),
        })?;
        sink(&record)?;
    }
    Ok(())
}

fn step(
    st: &mut RunState<'_>,
    iteration: usize,
    scalar_warm: &mut Option<KernelSpec>,
) -> Result<IterationRecord> {
    let config = st.config;
    let (d, t_max) = (st.d(), st.t_max());
    let mut rng = substream(st.seed(), "baseline", iteration as u64);
    let q = config.baseline_candidates_per_dim * (d + 1);
    let candidates: Vec<QueryPair> = (0..q)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            QueryPair::new(st.problem.project(&x), rng.gen_range(1..=t_max))
        })
        .collect();

    let (choice, score, models) = match config.algorithm {
        Algorithm::EhviT => {
            let models = st.fit()?;
            let scores = ehvi_scores(st, &models, &candidates, &mut rng);
            let best = argmax(&scores).unwrap_or(0);
            (best, scores[best], models)
        }
        Algorithm::ParegoT => {
            let scores = parego_scores(st, &candidates, scalar_warm, &mut rng)?;
            let best = argmax(&scores).unwrap_or(0);
            (best, scores[best], st.prior_models())
        }
        _ => (0, 0.0, st.prior_models()),
    };

    let QueryPair { x, t: epoch } = candidates[choice].clone();
    let id = st.add_setting(x);
    let mut reps = st.replicas(id);
    let mut obs = Vec::with_capacity(epoch);
    let mut truth = Vec::with_capacity(epoch);
    for t in 1..=epoch {
        let (y, tr) = reps.observe()?;
        st.archive.update_front(id, t, y.clone());
        st.count(&tr);
        obs.push(y);
        truth.push(tr);
        if st.budget_exhausted() {
            break;
        }
    }
    let kept = if config.algorithm == Algorithm::RandomT {
        Vec::new()
    } else {
        st.keep(&models, id, &obs)
    };
    let diagnostics = Diagnostics::Joint { epoch, score };
    Ok(st.record(Phase::Search, iteration, id, obs, truth, kept, Some(diagnostics)))
}

/// Single-point Monte Carlo EHVI with one set of normals shared by all
/// candidates.
fn ehvi_scores<R: Rng>(
    st: &RunState<'_>,
    models: &[GpModel],
    candidates: &[QueryPair],
    rng: &mut R,
) -> Vec<f64> {
    let m = st.config.acquisition.mc_samples;
    let k = models.len();
    let normals: Vec<f64> = (0..m * k).map(|_| rng.sample(StandardNormal)).collect();
    let marginals: Vec<(Vec<f64>, Vec<f64>)> =
        models.iter().map(|g| g.posterior_marginals(candidates)).collect();
    let front = st.archive.front_values();
    let ctx = HvContext::new(&front, st.archive.reference());
    map_indexed(st.config.execution, candidates.len(), |c| {
        let mut total = 0.0;
        let mut point = vec![0.0; k];
        for s in 0..m {
            for (i, (mean, var)) in marginals.iter().enumerate() {
                point[i] = mean[c] + var[c].sqrt() * normals[s * k + i];
            }
            total += ctx.hvi(&[point.as_slice()]);
        }
        total / m as f64
    })
}

/// Expected improvement of a random-weight Tchebycheff scalarization of
/// range-normalized objectives.
fn parego_scores<R: Rng>(
    st: &RunState<'_>,
    candidates: &[QueryPair],
    warm: &mut Option<KernelSpec>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let k = st.targets.len();
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let ranges: Vec<(f64, f64)> = st
        .targets
        .iter()
        .map(|ys| {
            let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, if hi > lo { hi - lo } else { 1.0 })
        })
        .collect();
    let scalar: Vec<f64> = (0..st.inputs.len())
        .map(|j| {
            let y: Vec<f64> = (0..k)
                .map(|i| (st.targets[i][j] - ranges[i].0) / ranges[i].1)
                .collect();
            scalarize_tchebycheff(&y, &weights, st.config.tchebycheff_rho)
        })
        .collect();
    let fit = fit_gp(
        st.inputs.clone(),
        &scalar,
        st.t_max(),
        TemporalKind::Rbf,
        warm.as_ref(),
        &st.config.fit,
    )?;
    *warm = Some(fit.model.spec().clone());
    let best = scalar.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mean, var) = fit.model.posterior_marginals(candidates);
    Ok(mean
        .iter()
        .zip(&var)
        .map(|(m, v)| expected_improvement(*m, v.sqrt(), best))
        .collect())
}
