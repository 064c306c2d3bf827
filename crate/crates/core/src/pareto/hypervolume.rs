//! Exact hypervolume.
//!
//! Two objectives use a sort-and-sweep, three objectives a dimension sweep
//! over the third coordinate, and four or more the WFG recursion over
//! limit sets. Points that are not strictly better than the reference point
//! in every coordinate span no volume and are dropped before any of these run;
//! duplicates and dominated points are dropped as well.

use super::{non_dominated, weakly_dominates};

/// Hypervolume of the region dominated by `points` and bounded by `r`.
pub fn hypervolume<P: AsRef<[f64]>>(points: &[P], r: &[f64]) -> f64 {
    let pts = prepare(points, r);
    hv_prepared(pts, r)
}

/// The WFG recursion applied to any number of objectives. Slower than the
/// specialised sweeps; kept public as a second route for cross-checking.
pub fn hypervolume_recursive<P: AsRef<[f64]>>(points: &[P], r: &[f64]) -> f64 {
    let pts = prepare(points, r);
    wfg(pts, r)
}

/// `HV(front ∪ points) − HV(front)`.
///
/// Exactly zero when every point is weakly dominated by the front or does
/// not improve on `r`.
pub fn hvi_set<P: AsRef<[f64]>, Q: AsRef<[f64]>>(points: &[P], front: &[Q], r: &[f64]) -> f64 {
    HvContext::new(front, r).hvi(points)
}

/// A front preprocessed against a fixed reference point, for repeated
/// improvement queries.
#[derive(Debug, Clone)]
pub struct HvContext {
    reference: Vec<f64>,
    /// Non-dominated, strictly inside `reference`; sorted by the first
    /// coordinate.
    front: Vec<Vec<f64>>,
    volume: f64,
}

impl HvContext {
    pub fn new<P: AsRef<[f64]>>(front: &[P], r: &[f64]) -> Self {
        let pts = prepare(front, r);
        let volume = hv_prepared(pts.clone(), r);
        Self {
            reference: r.to_vec(),
            front: pts,
            volume,
        }
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn front(&self) -> &[Vec<f64>] {
        &self.front
    }

    /// Hypervolume improvement of adding all of `points` at once.
    pub fn hvi<P: AsRef<[f64]>>(&self, points: &[P]) -> f64 {
        let r = &self.reference;
        let mut fresh: Vec<&[f64]> = Vec::new();
        for p in points {
            let p = p.as_ref();
            assert_eq!(p.len(), r.len(), "point length differs from reference point");
            if !inside(p, r) {
                continue;
            }
            if self.front.iter().any(|f| weakly_dominates(f, p)) {
                continue;
            }
            fresh.push(p);
        }
        if fresh.is_empty() {
            return 0.0;
        }
        if r.len() == 2 {
            return hvi_2d(&self.front, &fresh, r).max(0.0);
        }
        let mut union: Vec<Vec<f64>> = self.front.clone();
        union.extend(fresh.iter().map(|p| p.to_vec()));
        let keep = non_dominated(&union);
        let union: Vec<Vec<f64>> = keep.into_iter().map(|i| union[i].clone()).collect();
        (hv_prepared(union, r) - self.volume).max(0.0)
    }
}

fn inside(p: &[f64], r: &[f64]) -> bool {
    p.iter().zip(r).all(|(a, b)| a < b)
}

/// Clip to the reference box, deduplicate, drop dominated points and sort by
/// the first coordinate.
fn prepare<P: AsRef<[f64]>>(points: &[P], r: &[f64]) -> Vec<Vec<f64>> {
    let inside_pts: Vec<&[f64]> = points
        .iter()
        .map(|p| p.as_ref())
        .inspect(|p| assert_eq!(p.len(), r.len(), "point length differs from reference point"))
        .filter(|p| inside(p, r))
        .collect();
    let keep = non_dominated(&inside_pts);
    let mut pts: Vec<Vec<f64>> = keep.into_iter().map(|i| inside_pts[i].to_vec()).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Input must come from [`prepare`].
fn hv_prepared(pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    match r.len() {
        1 => r[0] - pts[0][0],
        2 => sweep_2d(&pts, r),
        3 => sweep_3d(pts, r),
        _ => wfg(pts, r),
    }
}

/// Points sorted by ascending first coordinate and mutually non-dominated,
/// so the second coordinate is strictly decreasing.
fn sweep_2d(pts: &[Vec<f64>], r: &[f64]) -> f64 {
    let mut area = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let right = pts.get(i + 1).map_or(r[0], |q| q[0]);
        area += (right - p[0]) * (r[1] - p[1]);
    }
    area
}

/// Improvement of `fresh` over the sorted staircase `front`. Every fresh
/// point is inside `r` and not weakly dominated by the front.
fn hvi_2d(front: &[Vec<f64>], fresh: &[&[f64]], r: &[f64]) -> f64 {
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(front.len() + fresh.len());
    merged.extend(front.iter().map(|p| [p[0], p[1]]));
    merged.extend(fresh.iter().map(|p| [p[0], p[1]]));
    merged.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut stair: Vec<[f64; 2]> = Vec::with_capacity(merged.len());
    for p in merged {
        if let Some(last) = stair.last() {
            if last[1] <= p[1] {
                continue;
            }
        }
        stair.push(p);
    }
    let mut area = 0.0;
    for (i, p) in stair.iter().enumerate() {
        let right = stair.get(i + 1).map_or(r[0], |q| q[0]);
        area += (right - p[0]) * (r[1] - p[1]);
    }
    area - sweep_2d(front, r)
}

/// Sweep along the third objective, maintaining the 2-D staircase of the
/// points seen so far.
fn sweep_3d(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut stair: Vec<[f64; 2]> = Vec::new();
    let mut volume = 0.0;
    for (i, p) in pts.iter().enumerate() {
        insert_staircase(&mut stair, [p[0], p[1]]);
        let next_z = pts.get(i + 1).map_or(r[2], |q| q[2]);
        let depth = next_z - p[2];
        if depth > 0.0 {
            volume += staircase_area(&stair, r) * depth;
        }
    }
    volume
}

fn insert_staircase(stair: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    if stair.iter().any(|q| q[0] <= p[0] && q[1] <= p[1]) {
        return;
    }
    stair.retain(|q| !(p[0] <= q[0] && p[1] <= q[1]));
    let pos = stair.partition_point(|q| q[0] < p[0]);
    stair.insert(pos, p);
}

fn staircase_area(stair: &[[f64; 2]], r: &[f64]) -> f64 {
    let mut area = 0.0;
    for (i, p) in stair.iter().enumerate() {
        let right = stair.get(i + 1).map_or(r[0], |q| q[0]);
        area += (right - p[0]) * (r[1] - p[1]);
    }
    area
}

/// WFG: the volume is the sum of exclusive contributions, each computed as
/// the point's box minus the volume of its limit set.
fn wfg(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    if r.len() == 1 {
        return pts.iter().map(|p| r[0] - p[0]).fold(0.0, f64::max);
    }
    let last = r.len() - 1;
    // Sorting on the last objective, worst first, keeps limit sets small.
    pts.sort_by(|a, b| b[last].total_cmp(&a[last]));
    let mut total = 0.0;
    for i in 0..pts.len() {
        total += exclusive(&pts, i, r);
    }
    total
}

fn exclusive(pts: &[Vec<f64>], i: usize, r: &[f64]) -> f64 {
    let p = &pts[i];
    let own = box_volume(p, r);
    let limit: Vec<Vec<f64>> = pts[i + 1..]
        .iter()
        .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
        .collect();
    if limit.is_empty() {
        return own;
    }
    let keep = non_dominated(&limit);
    let limit: Vec<Vec<f64>> = keep
        .into_iter()
        .map(|j| limit[j].clone())
        .filter(|q| inside(q, r))
        .collect();
    own - wfg(limit, r)
}

fn box_volume(p: &[f64], r: &[f64]) -> f64 {
    p.iter().zip(r).map(|(a, b)| b - a).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_front_has_zero_volume() {
        let empty: Vec<Vec<f64>> = Vec::new();
        assert_eq!(hypervolume(&empty, &[4.0, 4.0]), 0.0);
    }

    #[test]
    fn two_point_example() {
        let front = vec![vec![1.0, 3.0], vec![2.0, 1.0]];
        assert_eq!(hypervolume(&front, &[4.0, 4.0]), 7.0);
        assert_eq!(hypervolume_recursive(&front, &[4.0, 4.0]), 7.0);
    }

    #[test]
    fn hvi_examples() {
        let front = vec![vec![1.0, 3.0], vec![2.0, 1.0]];
        let r = [4.0, 4.0];
        assert_eq!(hvi_set(&[vec![3.0, 3.0]], &front, &r), 0.0);
        assert_eq!(hvi_set(&[vec![0.5, 0.5]], &front, &r), 5.25);
    }

    #[test]
    fn points_outside_reference_are_clipped() {
        let pts = vec![vec![1.0, 5.0], vec![4.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(hypervolume(&pts, &[4.0, 4.0]), 4.0);
    }

    #[test]
    fn three_d_single_box() {
        let pts = vec![vec![1.0, 1.0, 1.0]];
        assert_eq!(hypervolume(&pts, &[2.0, 3.0, 4.0]), 6.0);
        let pts = vec![vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        // 2·2·1 + 1·1·2 − 1·1·1
        assert_eq!(hypervolume(&pts, &[2.0, 2.0, 2.0]), 5.0);
    }

    #[test]
    fn four_d_matches_recursive_on_boxes() {
        let pts = vec![vec![0.0, 1.0, 1.0, 1.0], vec![1.0, 0.0, 1.0, 1.0]];
        let r = [2.0; 4];
        // 2·1·1·1 ·2 − 1·1·1·1
        assert_eq!(hypervolume(&pts, &r), 3.0);
    }
}
