//! Trajectory expected hypervolume improvement and the center-based
//! candidate search that maximizes it.

mod centers;

pub use centers::{CenterBook, CenterState};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::par::{argmax, map_indexed, Execution};
use crate::pareto::{HvContext, ParetoArchive};
use crate::surrogate::{
    sample_from_beliefs, trajectory_beliefs, BaseNormals, GpModel, PosteriorBelief,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionConfig {
    pub mc_samples: usize,
    /// Candidates per search-space dimension.
    pub candidates_per_dim: usize,
    pub gamma_max: f64,
    /// Consecutive failures after which a center is retired.
    pub max_failures: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            mc_samples: 128,
            candidates_per_dim: 100,
            gamma_max: 0.2,
            max_failures: 5,
        }
    }
}

impl AcquisitionConfig {
    pub fn candidates(&self, d: usize) -> usize {
        (self.candidates_per_dim * d).max(1)
    }
}

/// `q` Gaussian perturbations of `center` with standard deviation `gamma`,
/// clipped to the unit cube.
pub fn generate_candidates<R: Rng + ?Sized>(
    center: &[f64],
    gamma: f64,
    q: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let noise = Normal::new(0.0, gamma.max(0.0)).expect("finite standard deviation");
    (0..q)
        .map(|_| {
            center
                .iter()
                .map(|c| (c + noise.sample(rng)).clamp(0.0, 1.0))
                .collect()
        })
        .collect()
}

/// Monte Carlo TEHVI of one candidate from its per-objective trajectory
/// beliefs, using the supplied base normals.
pub fn tehvi(beliefs: &[PosteriorBelief], normals: &BaseNormals, ctx: &HvContext) -> Result<f64> {
    let samples = sample_from_beliefs(beliefs, normals)?;
    let m = samples.len().max(1) as f64;
    Ok(samples.iter().map(|s| ctx.hvi(s)).sum::<f64>() / m)
}

/// TEHVI at `x` with `m` fresh samples.
pub fn tehvi_at<R: Rng + ?Sized>(
    models: &[GpModel],
    x: &[f64],
    front: &[Vec<f64>],
    reference: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<f64> {
    let t_max = models.first().map_or(0, GpModel::t_max);
    let normals = BaseNormals::draw(rng, m, models.len(), t_max);
    let ctx = HvContext::new(front, reference);
    tehvi(&trajectory_beliefs(models, x), &normals, &ctx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDiagnostics {
    pub center: usize,
    pub radius: f64,
    pub best_tehvi: f64,
    pub candidates: usize,
    /// Set when every candidate matched a visited setting and the batch was
    /// redrawn.
    pub resampled: bool,
}

/// Scores `candidates` under shared base normals; returns all scores.
pub fn score_candidates(
    models: &[GpModel],
    candidates: &[Vec<f64>],
    normals: &BaseNormals,
    ctx: &HvContext,
    exec: Execution,
) -> Result<Vec<f64>> {
    map_indexed(exec, candidates.len(), |i| {
        tehvi(&trajectory_beliefs(models, &candidates[i]), normals, ctx)
    })
    .into_iter()
    .collect()
}

/// One acquisition step: pick a center, perturb it, and return the
/// candidate with the largest TEHVI. `project` maps raw candidates onto the
/// feasible set; candidates equal to a visited setting are dropped.
#[allow(clippy::too_many_arguments)]
pub fn select_next_setting<R, P>(
    models: &[GpModel],
    archive: &ParetoArchive,
    book: &mut CenterBook,
    visited: &[Vec<f64>],
    config: &AcquisitionConfig,
    project: P,
    rng: &mut R,
    exec: Execution,
) -> Result<(Vec<f64>, SelectionDiagnostics)>
where
    R: Rng + ?Sized,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let center = book.select_center(archive)?;
    let state = book.get(center).expect("selected center is registered");
    let (x_c, radius) = (state.x.clone(), state.radius);
    let d = x_c.len();
    let q = config.candidates(d);
    let t_max = models.first().map_or(0, GpModel::t_max);
    let normals = BaseNormals::draw(rng, config.mc_samples, models.len(), t_max);

    let mut resampled = false;
    let mut candidates = fresh(&x_c, radius, q, visited, &project, rng);
    if candidates.is_empty() {
        resampled = true;
        candidates = fresh(&x_c, radius, q, visited, &project, rng);
        if candidates.is_empty() {
            candidates = vec![project(&x_c)];
        }
    }

    let front = archive.front_values();
    let ctx = HvContext::new(&front, archive.reference());
    let scores = score_candidates(models, &candidates, &normals, &ctx, exec)?;
    let best = argmax(&scores).unwrap_or(0);
    let diagnostics = SelectionDiagnostics {
        center,
        radius,
        best_tehvi: scores.get(best).copied().unwrap_or(0.0),
        candidates: candidates.len(),
        resampled,
    };
    Ok((candidates.swap_remove(best), diagnostics))
}

fn fresh<R, P>(
    center: &[f64],
    radius: f64,
    q: usize,
    visited: &[Vec<f64>],
    project: &P,
    rng: &mut R,
) -> Vec<Vec<f64>>
where
    R: Rng + ?Sized,
    P: Fn(&[f64]) -> Vec<f64>,
{
    generate_candidates(center, radius, q, rng)
        .into_iter()
        .map(|c| project(&c))
        .filter(|c| !visited.contains(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;
    use rand::SeedableRng;

    use super::*;
    use crate::pareto::hvi_set;
    use crate::seeding::StreamRng;

    fn belief(mean: Vec<f64>, var: f64) -> PosteriorBelief {
        let n = mean.len();
        PosteriorBelief {
            mean,
            cov: DMatrix::identity(n, n) * var,
        }
    }

    #[test]
    fn tiny_radius_returns_center() {
        let mut rng = StreamRng::seed_from_u64(1);
        let c = generate_candidates(&[0.3, 0.7], 1e-300, 10, &mut rng);
        assert!(c.iter().all(|x| x == &vec![0.3, 0.7]));
    }

    #[test]
    fn corner_candidates_stay_inside() {
        let mut rng = StreamRng::seed_from_u64(2);
        let c = generate_candidates(&[0.0, 1.0, 0.0], 0.2, 1000, &mut rng);
        assert!(c.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn zero_variance_equals_mean_trajectory_hvi() {
        let front = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = [2.0, 2.0];
        let b = [belief(vec![0.5, 0.4, 0.3], 0.0), belief(vec![0.9, 0.5, 0.7], 0.0)];
        let traj = vec![vec![0.5, 0.9], vec![0.4, 0.5], vec![0.3, 0.7]];
        let expected = hvi_set(&traj, &front, &r);
        let mut rng = StreamRng::seed_from_u64(3);
        for m in [1, 7, 64] {
            let normals = BaseNormals::draw(&mut rng, m, 2, 3);
            let ctx = HvContext::new(&front, &r);
            let v = tehvi(&b, &normals, &ctx).unwrap();
            assert!((v - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn dominated_mean_gives_near_zero() {
        let front = vec![vec![0.0, 0.0]];
        let b = [belief(vec![1.0, 1.0], 1e-8), belief(vec![1.0, 1.0], 1e-8)];
        let mut rng = StreamRng::seed_from_u64(4);
        let normals = BaseNormals::draw(&mut rng, 128, 2, 2);
        let ctx = HvContext::new(&front, &[2.0, 2.0]);
        assert!(tehvi(&b, &normals, &ctx).unwrap() < 1e-6);
    }
}
