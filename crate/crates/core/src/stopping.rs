//! Early stopping of unpromising trajectories and the choice of which
//! observed epochs enter the surrogate's training data.

use serde::{Deserialize, Serialize};

use crate::par::argmax;
use crate::pareto::{dominates, HvContext};
use crate::surrogate::{GpModel, PosteriorBelief, QueryPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingConfig {
    pub beta: f64,
    pub augmentation_cap: usize,
    /// Stop once `t' ≥ t*`; when false, only once `t' > t*`.
    pub inclusive: bool,
    /// Count an epoch as promising when its LCB adds hypervolume, instead
    /// of when it dominates a front point.
    pub hvi_rule: bool,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            beta: 2.0,
            augmentation_cap: 10,
            inclusive: true,
            hvi_rule: false,
        }
    }
}

/// `lcb[t - 1][i] = μ_i(t) − √β · σ_i(t)`.
pub fn lcb_trajectory(beliefs: &[PosteriorBelief], beta: f64) -> Vec<Vec<f64>> {
    let t_max = beliefs.first().map_or(0, |b| b.mean.len());
    let root = beta.sqrt();
    (0..t_max)
        .map(|t| {
            beliefs
                .iter()
                .map(|b| b.mean[t] - root * b.std_dev(t))
                .collect()
        })
        .collect()
}

/// Epochs (1-based) whose LCB vector is promising against `front`.
pub fn promising_epochs(
    lcb: &[Vec<f64>],
    front: &[Vec<f64>],
    reference: &[f64],
    hvi_rule: bool,
) -> Vec<usize> {
    let ctx = hvi_rule.then(|| HvContext::new(front, reference));
    lcb.iter()
        .enumerate()
        .filter(|(_, l)| match &ctx {
            Some(ctx) => ctx.hvi(&[l.as_slice()]) > 0.0,
            None => front.iter().any(|y| dominates(l, y)),
        })
        .map(|(t, _)| t + 1)
        .collect()
}

/// The last promising epoch, if any.
pub fn conservative_stopping_epoch(
    beliefs: &[PosteriorBelief],
    front: &[Vec<f64>],
    reference: &[f64],
    config: &StoppingConfig,
) -> Option<usize> {
    let lcb = lcb_trajectory(beliefs, config.beta);
    promising_epochs(&lcb, front, reference, config.hvi_rule)
        .last()
        .copied()
}

pub fn should_stop(current: usize, stop_epoch: Option<usize>, inclusive: bool) -> bool {
    match stop_epoch {
        None => true,
        Some(t) if inclusive => current >= t,
        Some(t) => current > t,
    }
}

/// `Σ_i v_i(z) / max_z' v_i(z')` for each remaining point; objectives with
/// no remaining variance contribute nothing.
pub fn normalized_variance_scores(variances: &[Vec<f64>]) -> Vec<f64> {
    let n = variances.first().map_or(0, Vec::len);
    let mut score = vec![0.0; n];
    for v in variances {
        let top = v.iter().cloned().fold(0.0, f64::max);
        if top > 0.0 {
            for (s, vi) in score.iter_mut().zip(v) {
                *s += vi.max(0.0) / top;
            }
        }
    }
    score
}

/// Indices of at most `cap` observations to keep, in the order they were
/// picked. Sets within the cap are kept whole and in order. Otherwise the
/// first and last observation are anchored (only the last when `cap` is 1)
/// and the rest are chosen greedily by normalized variance, conditioning
/// each objective's belief on every pick.
pub fn select_augmentation_subset(
    models: &[GpModel],
    inputs: &[QueryPair],
    observations: &[Vec<f64>],
    cap: usize,
) -> Vec<usize> {
    let n = inputs.len();
    let cap = cap.max(1);
    if n <= cap {
        return (0..n).collect();
    }
    let mut beliefs: Vec<PosteriorBelief> = models.iter().map(|m| m.posterior(inputs)).collect();
    let noise: Vec<f64> = models.iter().map(GpModel::noise_variance).collect();
    let mut picked = Vec::with_capacity(cap);
    let mut remaining: Vec<usize> = (0..n).collect();
    let take = |j: usize, beliefs: &mut Vec<PosteriorBelief>, picked: &mut Vec<usize>| {
        for (i, b) in beliefs.iter_mut().enumerate() {
            b.condition(j, observations[j][i], noise[i]);
        }
        picked.push(j);
    };
    let anchors: Vec<usize> = if cap == 1 { vec![n - 1] } else { vec![0, n - 1] };
    for &a in &anchors {
        take(a, &mut beliefs, &mut picked);
        remaining.retain(|&j| j != a);
    }
    while picked.len() < cap && !remaining.is_empty() {
        let variances: Vec<Vec<f64>> = beliefs
            .iter()
            .map(|b| remaining.iter().map(|&j| b.variance(j)).collect())
            .collect();
        let scores = normalized_variance_scores(&variances);
        let at = argmax(&scores).unwrap_or(0);
        let j = remaining.remove(at);
        take(j, &mut beliefs, &mut picked);
    }
    picked
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::surrogate::{KernelSpec, TemporalKind};

    fn flat(mean: Vec<f64>) -> PosteriorBelief {
        let n = mean.len();
        PosteriorBelief {
            mean,
            cov: DMatrix::zeros(n, n),
        }
    }

    fn front() -> Vec<Vec<f64>> {
        vec![vec![0.0, 1.0], vec![1.0, 0.0]]
    }

    #[test]
    fn constant_dominating_lcb_runs_to_the_end() {
        let b = [flat(vec![-0.1; 6]), flat(vec![0.2; 6])];
        let t = conservative_stopping_epoch(&b, &front(), &[2.0, 2.0], &StoppingConfig::default());
        assert_eq!(t, Some(6));
    }

    #[test]
    fn non_dominating_lcb_has_no_stopping_epoch() {
        let b = [flat(vec![0.5; 6]), flat(vec![0.5; 6])];
        let cfg = StoppingConfig::default();
        assert_eq!(conservative_stopping_epoch(&b, &front(), &[2.0, 2.0], &cfg), None);
        // The same point does add hypervolume.
        let hvi = StoppingConfig { hvi_rule: true, ..cfg };
        assert_eq!(conservative_stopping_epoch(&b, &front(), &[2.0, 2.0], &hvi), Some(6));
    }

    #[test]
    fn last_promising_epoch_is_returned() {
        let b = [
            flat(vec![-0.1, -0.1, -0.1, 0.5, 0.5]),
            flat(vec![0.2, 0.2, 0.2, 0.5, 0.5]),
        ];
        let t = conservative_stopping_epoch(&b, &front(), &[2.0, 2.0], &StoppingConfig::default());
        assert_eq!(t, Some(3));
    }

    #[test]
    fn stopping_rule() {
        assert!(should_stop(3, Some(3), true));
        assert!(!should_stop(3, Some(3), false));
        assert!(!should_stop(2, Some(7), true));
        assert!(should_stop(1, None, true));
    }

    #[test]
    fn normalized_variance_example() {
        let s = normalized_variance_scores(&[vec![0.2, 0.1], vec![0.1, 0.4]]);
        assert!((s[0] - 1.25).abs() < 1e-15 && (s[1] - 1.5).abs() < 1e-15);
        assert_eq!(argmax(&s), Some(1));
    }

    fn trajectory(n: usize) -> (Vec<QueryPair>, Vec<Vec<f64>>) {
        let zs = (1..=n).map(|t| QueryPair::new(vec![0.4, 0.6], t)).collect();
        let ys = (1..=n).map(|t| vec![1.0 / t as f64, t as f64 / n as f64]).collect();
        (zs, ys)
    }

    fn prior_models(t_max: usize) -> Vec<GpModel> {
        [TemporalKind::ExpDecay, TemporalKind::Rbf]
            .into_iter()
            .map(|k| GpModel::prior(KernelSpec::default_for(2, k), t_max))
            .collect()
    }

    #[test]
    fn small_sets_are_kept_whole() {
        let (zs, ys) = trajectory(4);
        assert_eq!(select_augmentation_subset(&prior_models(20), &zs, &ys, 10), vec![0, 1, 2, 3]);
    }

    #[test]
    fn capped_selection_anchors_and_is_distinct() {
        let (zs, ys) = trajectory(30);
        let picks = select_augmentation_subset(&prior_models(30), &zs, &ys, 10);
        assert_eq!(picks.len(), 10);
        assert_eq!(&picks[..2], &[0, 29]);
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 10);
        assert_eq!(select_augmentation_subset(&prior_models(30), &zs, &ys, 1), vec![29]);
    }
}
