use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Problem;
use crate::error::{Error, Result};
use crate::seeding::StreamRng;

/// Observations of one setting at epochs `1..=len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub setting: Vec<f64>,
    /// `observations[t - 1]` is the objective vector at epoch `t`.
    pub observations: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(setting: Vec<f64>) -> Self {
        Self {
            setting,
            observations: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn at(&self, epoch: usize) -> Option<&[f64]> {
        epoch
            .checked_sub(1)
            .and_then(|i| self.observations.get(i))
            .map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub epoch: usize,
    /// Noisy values, what the optimizer sees.
    pub values: Vec<f64>,
    /// Noise-free values, for evaluation only.
    pub truth: Vec<f64>,
}

/// One training run of a setting, advanced one epoch at a time.
#[derive(Debug)]
pub struct TrainingSession {
    problem: Arc<Problem>,
    trajectory: Trajectory,
    truth: Vec<Vec<f64>>,
    noise_std: Vec<f64>,
    rng: StreamRng,
}

impl TrainingSession {
    pub(super) fn new(problem: Arc<Problem>, x: Vec<f64>, noise_seed: u64) -> Self {
        use rand::SeedableRng;
        let noise_std = problem.noise_std();
        Self {
            problem,
            trajectory: Trajectory::new(x),
            truth: Vec::new(),
            noise_std,
            rng: StreamRng::seed_from_u64(noise_seed),
        }
    }

    pub fn setting(&self) -> &[f64] {
        &self.trajectory.setting
    }

    pub fn epochs_completed(&self) -> usize {
        self.trajectory.len()
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// Noise-free values of the epochs completed so far.
    pub fn truth(&self) -> &[Vec<f64>] {
        &self.truth
    }

    /// Trains one more epoch and returns its noisy observation.
    pub fn observe_epoch(&mut self) -> Result<Observation> {
        let t_max = self.problem.t_max();
        let t = self.trajectory.len() + 1;
        if t > t_max {
            return Err(Error::SessionExhausted(t_max));
        }
        let truth = self.problem.evaluate(&self.trajectory.setting, t)?;
        let values: Vec<f64> = truth
            .iter()
            .zip(&self.noise_std)
            .map(|(f, s)| {
                let z: f64 = self.rng.sample(StandardNormal);
                if *s > 0.0 {
                    f + s * z
                } else {
                    *f
                }
            })
            .collect();
        self.trajectory.observations.push(values.clone());
        self.truth.push(truth.clone());
        Ok(Observation {
            epoch: t,
            values,
            truth,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Benchmark, CurveKind, ProblemSpec};
    use super::*;

    fn problem(noise: f64) -> Arc<Problem> {
        Arc::new(
            Problem::new(ProblemSpec::synthetic(
                Benchmark::Zdt1,
                5,
                50,
                vec![CurveKind::MInc, CurveKind::MInc],
                noise,
            ))
            .unwrap(),
        )
    }

    #[test]
    fn zero_noise_reproduces_trajectory() {
        let p = problem(0.0);
        let x = vec![1.0, 0.0, 0.0, 0.0, 0.0];
        let mut s = p.start_session(x.clone(), 1);
        for t in 1..=50 {
            let o = s.observe_epoch().unwrap();
            assert_eq!(o.epoch, t);
            assert_eq!(o.values, p.evaluate(&x, t).unwrap());
        }
        assert_eq!(s.trajectory().at(25).unwrap(), &[1.0, 0.0]);
        assert!(matches!(s.observe_epoch(), Err(Error::SessionExhausted(50))));
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let p = problem(0.05);
        let x = vec![0.2, 0.4, 0.6, 0.8, 0.1];
        let mut a = p.start_session(x.clone(), 9);
        let mut b = p.start_session(x.clone(), 9);
        let mut c = p.start_session(x, 10);
        for _ in 0..10 {
            let (oa, ob, oc) = (
                a.observe_epoch().unwrap(),
                b.observe_epoch().unwrap(),
                c.observe_epoch().unwrap(),
            );
            assert_eq!(oa, ob);
            assert_ne!(oa.values, oc.values);
            assert_eq!(oa.truth, oc.truth);
        }
    }
}
