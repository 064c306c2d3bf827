//! Brute-force reference implementations, kept deliberately naive. Used by
//! the self-test and the test suites to check the fast routines.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Hypervolume by inclusion–exclusion over every non-empty subset. The
/// intersection of the boxes `[p, r]` of a subset is the box from the
/// componentwise maximum to `r`. Exponential in the number of points.
pub fn hv_inclusion_exclusion(points: &[Vec<f64>], r: &[f64]) -> f64 {
    let pts: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(r).all(|(a, b)| a < b))
        .collect();
    assert!(pts.len() <= 20, "inclusion-exclusion oracle limited to 20 points");
    let n = pts.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut corner = vec![f64::NEG_INFINITY; r.len()];
        for (i, p) in pts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (c, v) in corner.iter_mut().zip(p.iter()) {
                    *c = c.max(*v);
                }
            }
        }
        let vol: f64 = corner.iter().zip(r).map(|(c, b)| b - c).product();
        if mask.count_ones() % 2 == 1 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

/// Hypervolume of integer-valued points by counting the unit cells of the
/// grid `[0, r)` that some point weakly dominates.
pub fn hv_grid_count(points: &[Vec<i64>], r: &[i64]) -> u64 {
    let k = r.len();
    let mut cell = vec![0i64; k];
    let mut count = 0u64;
    loop {
        if points.iter().any(|p| p.iter().zip(&cell).all(|(a, c)| a <= c)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == k {
                return count;
            }
            cell[i] += 1;
            if cell[i] < r[i] {
                break;
            }
            cell[i] = 0;
            i += 1;
        }
    }
}

fn strictly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// `(x, t)` index pairs of `values[x][t]` that no other pair restricted to
/// `settings` dominates.
pub fn pareto_pairs(values: &[Vec<Vec<f64>>], settings: &[usize]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for &x in settings {
        for (t, v) in values[x].iter().enumerate() {
            let beaten = settings
                .iter()
                .any(|&x2| values[x2].iter().any(|w| strictly_dominates(w, v)));
            if !beaten {
                out.insert((x, t));
            }
        }
    }
    out
}

/// Settings with at least one epoch whose value no pair of the full grid
/// dominates.
pub fn trajectory_optimal_settings(values: &[Vec<Vec<f64>>]) -> Vec<usize> {
    let all: Vec<usize> = (0..values.len()).collect();
    let pairs = pareto_pairs(values, &all);
    let set: BTreeSet<usize> = pairs.iter().map(|(x, _)| *x).collect();
    set.into_iter().collect()
}

/// Checks that restricting the grid to the trajectory-optimal settings
/// leaves the Pareto set of pairs unchanged.
pub fn trajectory_restriction_holds(values: &[Vec<Vec<f64>>]) -> bool {
    let all: Vec<usize> = (0..values.len()).collect();
    pareto_pairs(values, &trajectory_optimal_settings(values)) == pareto_pairs(values, &all)
}

/// Plain Monte Carlo expected hypervolume improvement of one point with
/// independent Gaussian coordinates. Returns the estimate and its
/// standard error.
pub fn ehvi_monte_carlo<R: Rng + ?Sized>(
    mean: &[f64],
    sd: &[f64],
    front: &[Vec<f64>],
    r: &[f64],
    samples: usize,
    rng: &mut R,
) -> (f64, f64) {
    let base = hv_inclusion_exclusion(front, r);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut with = front.to_vec();
    with.push(vec![0.0; mean.len()]);
    let last = with.len() - 1;
    for _ in 0..samples {
        for i in 0..mean.len() {
            let z: f64 = StandardNormal.sample(rng);
            with[last][i] = mean[i] + sd[i] * z;
        }
        let gain = (hv_inclusion_exclusion(&with, r) - base).max(0.0);
        sum += gain;
        sum_sq += gain * gain;
    }
    let n = samples as f64;
    let m = sum / n;
    let var = (sum_sq / n - m * m).max(0.0) * n / (n - 1.0);
    (m, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let pts = vec![vec![1.0, 3.0], vec![2.0, 1.0]];
        assert_eq!(hv_inclusion_exclusion(&pts, &[4.0, 4.0]), 7.0);
        let ipts = vec![vec![1, 3], vec![2, 1]];
        assert_eq!(hv_grid_count(&ipts, &[4, 4]), 7);
        assert_eq!(hv_inclusion_exclusion(&[vec![5.0, 0.0]], &[4.0, 4.0]), 0.0);
    }

    #[test]
    fn trajectory_optimal_settings_of_a_small_grid() {
        // Setting 1 is dominated at every epoch by setting 0's second epoch.
        let values = vec![
            vec![vec![3.0, 1.0], vec![1.0, 2.0]],
            vec![vec![2.0, 3.0], vec![4.0, 4.0]],
            vec![vec![0.5, 5.0], vec![6.0, 6.0]],
        ];
        assert_eq!(trajectory_optimal_settings(&values), vec![0, 2]);
        assert!(trajectory_restriction_holds(&values));
    }
}
