use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use tmobo::acquisition::tehvi;
use tmobo::oracles::ehvi_monte_carlo;
use tmobo::pareto::{hvi_set, HvContext};
use tmobo::seeding::substream;
use tmobo::surrogate::{
    sample_trajectories, BaseNormals, GpModel, KernelSpec, PosteriorBelief, QueryPair, TemporalKind,
};

fn training_set(seed: u64, n: usize, d: usize, t_max: usize) -> (Vec<QueryPair>, Vec<f64>) {
    let mut rng = substream(seed, "tests", 0);
    let zs: Vec<QueryPair> = (0..n)
        .map(|_| QueryPair::new((0..d).map(|_| rng.gen()).collect(), rng.gen_range(1..=t_max)))
        .collect();
    let ys = zs
        .iter()
        .map(|z| z.x.iter().sum::<f64>().sin() * (1.0 + 0.1 * z.t as f64))
        .collect();
    (zs, ys)
}

#[test]
fn posterior_ignores_training_order() {
    let (zs, ys) = training_set(3, 25, 2, 8);
    let spec = KernelSpec::default_for(2, TemporalKind::ExpDecay);
    let a = GpModel::new(spec.clone(), 8, zs.clone(), &ys).unwrap();
    let order: Vec<usize> = (0..zs.len()).rev().collect();
    let b = GpModel::new(
        spec,
        8,
        order.iter().map(|&i| zs[i].clone()).collect(),
        &order.iter().map(|&i| ys[i]).collect::<Vec<_>>(),
    )
    .unwrap();
    let x = vec![0.3, 0.6];
    let (pa, pb) = (a.trajectory_posterior(&x), b.trajectory_posterior(&x));
    for t in 0..8 {
        assert!((pa.mean[t] - pb.mean[t]).abs() < 1e-9);
        for u in 0..8 {
            assert!((pa.cov[(t, u)] - pb.cov[(t, u)]).abs() < 1e-9);
        }
    }
}

#[test]
fn sampled_trajectories_match_posterior_moments() {
    let (zs, ys) = training_set(5, 20, 2, 6);
    let model = GpModel::new(KernelSpec::default_for(2, TemporalKind::Rbf), 6, zs, &ys).unwrap();
    let models = vec![model.clone(), model];
    let x = vec![0.4, 0.2];
    let m = 10_000;
    let samples = sample_trajectories(&models, &x, m, &mut substream(9, "tests", 1)).unwrap();
    let post = models[0].trajectory_posterior(&x);
    for t in 0..6 {
        let vals: Vec<f64> = samples.iter().map(|s| s[t][0]).collect();
        let mean = vals.iter().sum::<f64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let se = (post.cov[(t, t)] / m as f64).sqrt();
        assert!((mean - post.mean[t]).abs() <= 3.0 * se, "epoch {t}: mean {mean} vs {}", post.mean[t]);
        assert!((var / post.cov[(t, t)] - 1.0).abs() <= 0.1, "epoch {t}: var {var} vs {}", post.cov[(t, t)]);
    }
}

fn belief(mean: Vec<f64>, var: f64) -> PosteriorBelief {
    let n = mean.len();
    PosteriorBelief {
        mean,
        cov: DMatrix::identity(n, n) * var,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tehvi_without_variance_is_the_mean_improvement(
        m0 in prop::collection::vec(0.0f64..1.0, 1..6),
        m1 in prop::collection::vec(0.0f64..1.0, 6),
        front in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..5),
    ) {
        let t = m0.len();
        let beliefs = vec![belief(m0.clone(), 0.0), belief(m1[..t].to_vec(), 0.0)];
        let r = [1.0, 1.0];
        let normals = BaseNormals::draw(&mut substream(1, "tests", 2), 8, 2, t);
        let got = tehvi(&beliefs, &normals, &HvContext::new(&front, &r)).unwrap();
        let traj: Vec<Vec<f64>> = (0..t).map(|i| vec![m0[i], m1[i]]).collect();
        prop_assert!((got - hvi_set(&traj, &front, &r)).abs() <= 1e-12);
    }

    #[test]
    fn tehvi_is_non_negative_and_grows_with_a_better_mean(
        shift in 0.0f64..0.3,
        var in 0.0f64..0.05,
    ) {
        let front = vec![vec![0.2, 0.8], vec![0.5, 0.5], vec![0.8, 0.2]];
        let r = [1.0, 1.0];
        let ctx = HvContext::new(&front, &r);
        let normals = BaseNormals::draw(&mut substream(4, "tests", 3), 64, 2, 3);
        let at = |s: f64| {
            let beliefs = vec![belief(vec![0.6 - s; 3], var), belief(vec![0.6 - s; 3], var)];
            tehvi(&beliefs, &normals, &ctx).unwrap()
        };
        let (base, better) = (at(0.0), at(shift));
        prop_assert!(base >= 0.0);
        prop_assert!(better >= base - 1e-12);
    }
}

#[test]
fn single_epoch_tehvi_matches_plain_ehvi() {
    let front = vec![vec![0.2, 0.7], vec![0.6, 0.3]];
    let r = [1.0, 1.0];
    let (mean, sd) = ([0.45, 0.45], [0.15, 0.1]);
    let beliefs = vec![belief(vec![mean[0]], sd[0] * sd[0]), belief(vec![mean[1]], sd[1] * sd[1])];
    let ctx = HvContext::new(&front, &r);
    let batches: Vec<f64> = (0..20)
        .map(|b| {
            let normals = BaseNormals::draw(&mut substream(11, "tests", b), 5_000, 2, 1);
            tehvi(&beliefs, &normals, &ctx).unwrap()
        })
        .collect();
    let est = batches.iter().sum::<f64>() / 20.0;
    let sd_b = (batches.iter().map(|v| (v - est).powi(2)).sum::<f64>() / 19.0).sqrt();
    let se = sd_b / 20f64.sqrt();
    let (oracle, oracle_se) = ehvi_monte_carlo(&mean, &sd, &front, &r, 100_000, &mut substream(12, "tests", 0));
    let tol = 2.0 * (se * se + oracle_se * oracle_se).sqrt();
    assert!((est - oracle).abs() <= tol, "{est} vs {oracle} (tol {tol})");
}
