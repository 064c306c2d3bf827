//! Pareto dominance, front maintenance and hypervolume geometry.
//!
//! Everything here assumes minimization.

mod archive;
pub mod hypervolume;

pub use archive::{ArchiveEntry, ParetoArchive};
pub use hypervolume::{hvi_set, hypervolume, hypervolume_recursive, HvContext};

/// `a` dominates `b`: no worse in every objective and strictly better in one.
///
/// Panics if the lengths differ.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance check on vectors of different length");
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// `a` dominates or equals `b`.
pub fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "dominance check on vectors of different length");
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Indices of the non-dominated points. Among exact duplicates only the
/// first occurrence is reported.
pub fn non_dominated<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    let mut front: Vec<usize> = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        for &j in &front {
            if weakly_dominates(points[j].as_ref(), p) {
                continue 'outer;
            }
        }
        front.retain(|&j| !dominates(p, points[j].as_ref()));
        front.push(i);
    }
    front.sort_unstable();
    front
}

/// Componentwise maximum of `r` and `observation`, i.e. the worst value seen
/// so far in every objective.
pub fn update_reference_point(r: &[f64], observation: &[f64]) -> Vec<f64> {
    assert_eq!(r.len(), observation.len(), "reference point length mismatch");
    r.iter().zip(observation).map(|(a, b)| a.max(*b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 2.0]));
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]));
        assert!(!dominates(&[0.5, 3.0], &[1.0, 1.0]));
        assert!(!dominates(&[1.0, 1.0], &[0.5, 3.0]));
    }

    #[test]
    #[should_panic]
    fn dominance_length_mismatch_panics() {
        dominates(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn non_dominated_skips_duplicates() {
        let pts = vec![vec![1.0, 3.0], vec![2.0, 1.0], vec![1.0, 3.0], vec![3.0, 3.0]];
        assert_eq!(non_dominated(&pts), vec![0, 1]);
    }

    #[test]
    fn reference_point_update() {
        assert_eq!(update_reference_point(&[4.0, 4.0], &[5.0, 1.0]), vec![5.0, 4.0]);
        assert_eq!(update_reference_point(&[4.0, 4.0], &[1.0, 1.0]), vec![4.0, 4.0]);
        let stream = [[1.0, 7.0], [3.0, 2.0], [0.0, 9.0]];
        let r = stream
            .iter()
            .fold(vec![f64::NEG_INFINITY; 2], |r, y| update_reference_point(&r, y));
        assert_eq!(r, vec![3.0, 9.0]);
    }
}
