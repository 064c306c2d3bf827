use nalgebra::DMatrix;
use proptest::prelude::*;

use tmobo::stopping::{
    conservative_stopping_epoch, lcb_trajectory, promising_epochs, should_stop, StoppingConfig,
};
use tmobo::surrogate::PosteriorBelief;

fn belief(mean: Vec<f64>, var: Vec<f64>) -> PosteriorBelief {
    PosteriorBelief {
        cov: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(var)),
        mean,
    }
}

fn beliefs(t_max: usize) -> impl Strategy<Value = Vec<PosteriorBelief>> {
    prop::collection::vec(
        (
            prop::collection::vec(0.0f64..1.2, t_max),
            prop::collection::vec(0.0f64..0.05, t_max),
        )
            .prop_map(|(m, v)| belief(m, v)),
        2,
    )
}

fn front() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn larger_beta_only_adds_promising_epochs(
        b in beliefs(8), f in front(), beta1 in 0.0f64..4.0, extra in 0.0f64..4.0, hvi in any::<bool>(),
    ) {
        let r = [1.5, 1.5];
        let small = promising_epochs(&lcb_trajectory(&b, beta1), &f, &r, hvi);
        let large = promising_epochs(&lcb_trajectory(&b, beta1 + extra), &f, &r, hvi);
        prop_assert!(small.iter().all(|t| large.contains(t)), "{small:?} vs {large:?}");
        let at = |beta| conservative_stopping_epoch(&b, &f, &r, &StoppingConfig { beta, hvi_rule: hvi, ..StoppingConfig::default() });
        prop_assert!(at(beta1).unwrap_or(0) <= at(beta1 + extra).unwrap_or(0));
    }

    #[test]
    fn once_stopped_training_stays_stopped(
        stop in prop::option::of(1usize..20), inclusive in any::<bool>(), t in 1usize..20,
    ) {
        if should_stop(t, stop, inclusive) {
            prop_assert!(should_stop(t + 1, stop, inclusive));
        }
    }
}

fn flat(lcb: [f64; 2], t_max: usize) -> Vec<PosteriorBelief> {
    vec![belief(vec![lcb[0]; t_max], vec![0.0; t_max]), belief(vec![lcb[1]; t_max], vec![0.0; t_max])]
}

#[test]
fn stopping_epoch_examples() {
    let f = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    let r = [2.0, 2.0];
    let config = StoppingConfig::default();
    assert_eq!(conservative_stopping_epoch(&flat([-0.1, 0.2], 7), &f, &r, &config), Some(7));
    assert_eq!(conservative_stopping_epoch(&flat([0.5, 0.5], 7), &f, &r, &config), None);
    let mut b = flat([0.5, 0.5], 7);
    for t in 0..3 {
        b[0].mean[t] = -0.1;
        b[1].mean[t] = 0.2;
    }
    assert_eq!(conservative_stopping_epoch(&b, &f, &r, &config), Some(3));
}
