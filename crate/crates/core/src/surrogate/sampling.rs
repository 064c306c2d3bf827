//! Joint posterior sampling of predicted trajectories.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::gp::{cholesky_jittered, GpModel, PosteriorBelief};
use crate::error::{Error, Result};

/// `samples[m][t - 1][i]`: objective `i` at epoch `t` in draw `m`.
pub type TrajectorySamples = Vec<Vec<Vec<f64>>>;

/// Standard normal draws shaped `[sample][objective][epoch]`. Sharing one
/// set across candidates gives common random numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseNormals {
    m: usize,
    k: usize,
    t_max: usize,
    z: Vec<f64>,
}

impl BaseNormals {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, m: usize, k: usize, t_max: usize) -> Self {
        let z = (0..m * k * t_max).map(|_| rng.sample(StandardNormal)).collect();
        Self { m, k, t_max, z }
    }

    pub fn samples(&self) -> usize {
        self.m
    }

    fn row(&self, sample: usize, objective: usize) -> &[f64] {
        let at = (sample * self.k + objective) * self.t_max;
        &self.z[at..at + self.t_max]
    }
}

/// Lower factor `L` with `L Lᵀ ≈ cov`, escalating jitter as needed.
pub fn factor_psd(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    cholesky_jittered(cov).map(|(l, _)| l)
}

/// Maps base normals through each objective's belief.
pub fn sample_from_beliefs(
    beliefs: &[PosteriorBelief],
    normals: &BaseNormals,
) -> Result<TrajectorySamples> {
    let k = beliefs.len();
    if k != normals.k {
        return Err(Error::DimensionMismatch {
            expected: normals.k,
            got: k,
        });
    }
    let t_max = normals.t_max;
    if let Some(b) = beliefs.iter().find(|b| b.mean.len() != t_max) {
        return Err(Error::DimensionMismatch {
            expected: t_max,
            got: b.mean.len(),
        });
    }
    let factors = beliefs
        .iter()
        .map(|b| factor_psd(&b.cov))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![vec![0.0; k]; t_max]; normals.m];
    for (m, sample) in out.iter_mut().enumerate() {
        for (i, (b, l)) in beliefs.iter().zip(&factors).enumerate() {
            let z = normals.row(m, i);
            for (t, row) in sample.iter_mut().enumerate() {
                let mut v = b.mean[t];
                for (c, zc) in z.iter().enumerate().take(t + 1) {
                    v += l[(t, c)] * zc;
                }
                row[i] = v;
            }
        }
    }
    Ok(out)
}

/// Trajectory beliefs of every objective at setting `x`.
pub fn trajectory_beliefs(models: &[GpModel], x: &[f64]) -> Vec<PosteriorBelief> {
    models.iter().map(|m| m.trajectory_posterior(x)).collect()
}

/// Draws `m` joint trajectory samples at `x`, one independent GP per
/// objective.
pub fn sample_trajectories<R: Rng + ?Sized>(
    models: &[GpModel],
    x: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<TrajectorySamples> {
    let t_max = models.first().map_or(0, GpModel::t_max);
    let normals = BaseNormals::draw(rng, m, models.len(), t_max);
    sample_from_beliefs(&trajectory_beliefs(models, x), &normals)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::seeding::StreamRng;

    #[test]
    fn zero_variance_samples_equal_mean() {
        let b = PosteriorBelief {
            mean: vec![1.0, 2.0, 3.0],
            cov: DMatrix::zeros(3, 3),
        };
        let mut rng = StreamRng::seed_from_u64(3);
        let n = BaseNormals::draw(&mut rng, 20, 2, 3);
        let s = sample_from_beliefs(&[b.clone(), b], &n).unwrap();
        for draw in &s {
            for (t, row) in draw.iter().enumerate() {
                assert_eq!(row, &vec![(t + 1) as f64; 2]);
            }
        }
    }

    #[test]
    fn moments_match_known_covariance() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.8, 0.8, 1.0]);
        let b = PosteriorBelief {
            mean: vec![0.5, -0.5],
            cov,
        };
        let mut rng = StreamRng::seed_from_u64(11);
        let n = BaseNormals::draw(&mut rng, 20_000, 1, 2);
        let s = sample_from_beliefs(&[b], &n).unwrap();
        let m = s.len() as f64;
        let mean0 = s.iter().map(|d| d[0][0]).sum::<f64>() / m;
        let cross = s.iter().map(|d| (d[0][0] - 0.5) * (d[1][0] + 0.5)).sum::<f64>() / m;
        assert!((mean0 - 0.5).abs() < 3.0 / m.sqrt());
        assert!((cross - 0.8).abs() < 0.05);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let b = PosteriorBelief {
            mean: vec![0.0; 4],
            cov: DMatrix::identity(4, 4),
        };
        let mut rng = StreamRng::seed_from_u64(0);
        let n = BaseNormals::draw(&mut rng, 2, 1, 3);
        assert!(sample_from_beliefs(&[b], &n).is_err());
    }
}
