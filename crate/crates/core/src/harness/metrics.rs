//! Hypervolume-difference series against a shared true-front estimate.

use serde::{Deserialize, Serialize};

use super::trial::TrialData;
use crate::error::{Error, Result};
use crate::pareto::{hypervolume, non_dominated};

/// Differences below this clamp before the logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Iter,
    Epochs,
    Cost,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Iter => "iter",
            Axis::Epochs => "epochs",
            Axis::Cost => "cost",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Axis::Iter, Axis::Epochs, Axis::Cost]
            .into_iter()
            .find(|a| a.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueFront {
    pub front: Vec<Vec<f64>>,
    pub reference: Vec<f64>,
    pub hypervolume: f64,
}

/// Values the metric sees for a record: noise-free when available.
fn metric_values(r: &crate::optimizers::IterationRecord) -> &[Vec<f64>] {
    if r.truth.len() == r.observations.len() && !r.truth.is_empty() {
        &r.truth
    } else {
        &r.observations
    }
}

/// Non-dominated front of every value any trial saw, with the
/// componentwise-worst value as reference point.
pub fn estimate_true_front(trials: &[TrialData]) -> Result<TrueFront> {
    let mut union: Vec<Vec<f64>> = Vec::new();
    let mut k = None;
    for trial in trials {
        for r in &trial.records {
            for v in metric_values(r) {
                match k {
                    None => k = Some(v.len()),
                    Some(k) if k != v.len() => {
                        return Err(Error::Harness(format!(
                            "mixed objective counts ({k} and {}) in one problem",
                            v.len()
                        )))
                    }
                    _ => {}
                }
                union.push(v.clone());
            }
        }
    }
    let k = k.ok_or_else(|| Error::Harness("no observations to estimate a front from".into()))?;
    let mut reference = vec![f64::NEG_INFINITY; k];
    for v in &union {
        for (r, x) in reference.iter_mut().zip(v) {
            *r = r.max(*x);
        }
    }
    let mut front: Vec<Vec<f64>> = non_dominated(&union)
        .into_iter()
        .map(|i| union[i].clone())
        .collect();
    front.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let hv = hypervolume(&front, &reference);
    Ok(TrueFront {
        front,
        reference,
        hypervolume: hv,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub iteration: usize,
    pub epochs: usize,
    pub cost: f64,
    pub hypervolume: f64,
    pub log_hv_difference: f64,
}

impl SeriesPoint {
    pub fn axis_value(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Iter => self.iteration as f64,
            Axis::Epochs => self.epochs as f64,
            Axis::Cost => self.cost,
        }
    }
}

pub fn log_difference(truth_hv: f64, hv: f64) -> f64 {
    (truth_hv - hv).max(LOG_FLOOR).log10()
}

/// One point after initialization and one per search iteration.
pub fn trial_series(trial: &TrialData, truth: &TrueFront) -> Result<Vec<SeriesPoint>> {
    if trial.records.is_empty() {
        return Err(Error::Harness(format!(
            "trial {} of {} / {} has no records",
            trial.header.trial, trial.header.problem, trial.header.label
        )));
    }
    let mut front: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for (idx, r) in trial.records.iter().enumerate() {
        for v in metric_values(r) {
            front.push(v.clone());
        }
        let keep = non_dominated(&front);
        front = keep.into_iter().map(|i| front[i].clone()).collect();
        let next_is_init = trial
            .records
            .get(idx + 1)
            .is_some_and(|n| n.phase == crate::optimizers::Phase::Init);
        if r.phase == crate::optimizers::Phase::Init && next_is_init {
            continue;
        }
        let hv = hypervolume(&front, &truth.reference);
        out.push(SeriesPoint {
            iteration: r.iteration,
            epochs: r.cumulative_epochs,
            cost: r.cumulative_cost,
            hypervolume: hv,
            log_hv_difference: log_difference(truth.hypervolume, hv),
        });
    }
    Ok(out)
}

/// Step-function sample: the last point at or before `x`, or the first
/// point when `x` precedes every point.
pub fn sample_at(series: &[SeriesPoint], axis: Axis, x: f64) -> f64 {
    let mut value = series[0].log_hv_difference;
    for p in series {
        if p.axis_value(axis) <= x {
            value = p.log_hv_difference;
        } else {
            break;
        }
    }
    value
}

/// Shared grid for one problem: every iteration index, or 101 evenly
/// spaced points up to the largest epoch or cost total.
pub fn grid(all: &[&[SeriesPoint]], axis: Axis) -> Vec<f64> {
    let top = all
        .iter()
        .filter_map(|s| s.last())
        .map(|p| p.axis_value(axis))
        .fold(0.0, f64::max);
    match axis {
        Axis::Iter => (0..=top as usize).map(|i| i as f64).collect(),
        _ if top <= 0.0 => vec![0.0],
        _ => (0..=100).map(|i| top * i as f64 / 100.0).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub x: f64,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub trials: usize,
}

/// Mean and two-standard-error band across trials at each grid point.
pub fn aggregate(series: &[Vec<SeriesPoint>], axis: Axis, grid: &[f64]) -> Vec<BandPoint> {
    grid.iter()
        .map(|&x| {
            let vals: Vec<f64> = series.iter().map(|s| sample_at(s, axis, x)).collect();
            let (mean, sd) = mean_sd(&vals);
            let se = if vals.is_empty() {
                0.0
            } else {
                sd / (vals.len() as f64).sqrt()
            };
            BandPoint {
                x,
                mean,
                sd,
                se,
                lower: mean - 2.0 * se,
                upper: mean + 2.0 * se,
                trials: vals.len(),
            }
        })
        .collect()
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Min–max normalization onto `[0, 1]`; a constant set maps to 0.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_clamps_exact_match() {
        assert_eq!(log_difference(3.0, 3.0), -12.0);
        assert_eq!(log_difference(3.0, 3.5), -12.0);
        assert!((log_difference(1.0, 0.9) - 0.1f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn mean_sd_reference_values() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_sd(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize(&[2.0, 4.0, 3.0]), vec![0.0, 1.0, 0.5]);
        assert_eq!(normalize(&[1.0, 1.0]), vec![0.0, 0.0]);
    }
}
