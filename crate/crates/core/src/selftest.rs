//! Quick consistency checks of the exact routines against the oracles.

use nalgebra::DMatrix;
use rand::Rng;

use crate::acquisition::tehvi;
use crate::oracles::{hv_grid_count, hv_inclusion_exclusion, trajectory_restriction_holds};
use crate::pareto::{hvi_set, hypervolume, HvContext};
use crate::seeding::substream;
use crate::surrogate::{BaseNormals, PosteriorBelief};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_front<R: Rng>(rng: &mut R, k: usize, max_points: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=max_points);
    (0..n).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect()
}

fn hv_exact(seed: u64) -> Check {
    let mut rng = substream(seed, "selftest-hv", 0);
    let mut worst = 0.0f64;
    for i in 0..300 {
        let k = 2 + i % 3;
        let front = random_front(&mut rng, k, 8);
        let r = vec![1.0; k];
        let want = hv_inclusion_exclusion(&front, &r);
        let got = hypervolume(&front, &r);
        worst = worst.max((got - want).abs() / want.max(1e-300));
    }
    Check {
        name: "hypervolume vs inclusion-exclusion",
        passed: worst <= 1e-9,
        detail: format!("300 fronts, worst relative error {worst:.2e}"),
    }
}

fn hv_grid(seed: u64) -> Check {
    let mut rng = substream(seed, "selftest-grid", 0);
    let mut mismatches = 0;
    for i in 0..200 {
        let k = 2 + i % 2;
        let n = rng.gen_range(1..=6);
        let pts: Vec<Vec<i64>> = (0..n).map(|_| (0..k).map(|_| rng.gen_range(0..8)).collect()).collect();
        let r = vec![8i64; k];
        let want = hv_grid_count(&pts, &r) as f64;
        let fpts: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|&v| v as f64).collect()).collect();
        let got = hypervolume(&fpts, &[8.0; 3][..k]);
        if got != want {
            mismatches += 1;
        }
    }
    Check {
        name: "hypervolume vs grid counting",
        passed: mismatches == 0,
        detail: format!("200 integer fronts, {mismatches} mismatches"),
    }
}

fn trajectory_restriction(seed: u64) -> Check {
    let mut rng = substream(seed, "selftest-trajectory", 0);
    let mut failures = 0;
    for _ in 0..200 {
        let nx = rng.gen_range(1..=6);
        let nt = rng.gen_range(1..=5);
        let values: Vec<Vec<Vec<f64>>> = (0..nx)
            .map(|_| {
                (0..nt)
                    .map(|_| vec![rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64])
                    .collect()
            })
            .collect();
        if !trajectory_restriction_holds(&values) {
            failures += 1;
        }
    }
    Check {
        name: "trajectory-optimal restriction keeps the Pareto set",
        passed: failures == 0,
        detail: format!("200 grids, {failures} failures"),
    }
}

fn tehvi_degenerate(seed: u64) -> Check {
    let mut rng = substream(seed, "selftest-tehvi", 0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t_max = rng.gen_range(1..=6);
        let beliefs: Vec<PosteriorBelief> = (0..2)
            .map(|_| PosteriorBelief {
                mean: (0..t_max).map(|_| rng.gen::<f64>()).collect(),
                cov: DMatrix::zeros(t_max, t_max),
            })
            .collect();
        let front = random_front(&mut rng, 2, 5);
        let r = vec![1.0, 1.0];
        let normals = BaseNormals::draw(&mut rng, 16, 2, t_max);
        let got = tehvi(&beliefs, &normals, &HvContext::new(&front, &r)).expect("zero covariance factors");
        let traj: Vec<Vec<f64>> = (0..t_max).map(|t| vec![beliefs[0].mean[t], beliefs[1].mean[t]]).collect();
        worst = worst.max((got - hvi_set(&traj, &front, &r)).abs());
    }
    Check {
        name: "zero-variance TEHVI equals the mean trajectory's improvement",
        passed: worst <= 1e-12,
        detail: format!("50 cases, worst absolute error {worst:.2e}"),
    }
}

pub fn run(seed: u64) -> Vec<Check> {
    vec![
        hv_exact(seed),
        hv_grid(seed),
        trajectory_restriction(seed),
        tehvi_degenerate(seed),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
