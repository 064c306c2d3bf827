use serde::{Deserialize, Serialize};

use super::{dominates, hypervolume, non_dominated, weakly_dominates};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub setting: usize,
    pub epoch: usize,
    pub values: Vec<f64>,
}

/// Every observation made during a run, with the current non-dominated
/// front and an adaptive reference point.
///
/// The reference point is the componentwise worst value observed so far
/// (folded with any initial reference), so every front value is always
/// within it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    k: usize,
    entries: Vec<ArchiveEntry>,
    front: Vec<usize>,
    reference: Vec<f64>,
}

impl ParetoArchive {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            entries: Vec::new(),
            front: Vec::new(),
            reference: vec![f64::NEG_INFINITY; k],
        }
    }

    /// Archive whose reference point starts at `r` and only ever grows.
    pub fn with_reference(r: Vec<f64>) -> Self {
        Self {
            k: r.len(),
            entries: Vec::new(),
            front: Vec::new(),
            reference: r,
        }
    }

    pub fn num_objectives(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// Indices into [`entries`](Self::entries) of the current front.
    pub fn front_indices(&self) -> &[usize] {
        &self.front
    }

    pub fn front_values(&self) -> Vec<Vec<f64>> {
        self.front
            .iter()
            .map(|&i| self.entries[i].values.clone())
            .collect()
    }

    /// Appends an observation and maintains the front. Returns whether the
    /// entry joined the front; an exact duplicate of a front vector is
    /// stored but does not.
    pub fn update_front(&mut self, setting: usize, epoch: usize, values: Vec<f64>) -> bool {
        assert_eq!(values.len(), self.k, "observation length differs from archive");
        for (r, v) in self.reference.iter_mut().zip(&values) {
            *r = r.max(*v);
        }
        let idx = self.entries.len();
        let joins = !self
            .front
            .iter()
            .any(|&j| weakly_dominates(&self.entries[j].values, &values));
        if joins {
            let entries = &self.entries;
            self.front.retain(|&j| !dominates(&values, &entries[j].values));
            self.front.push(idx);
        }
        self.entries.push(ArchiveEntry {
            setting,
            epoch,
            values,
        });
        joins
    }

    pub fn hypervolume(&self) -> f64 {
        hypervolume(&self.front_values(), &self.reference)
    }

    /// Settings that own at least one entry, in order of first appearance.
    pub fn settings(&self) -> Vec<usize> {
        let mut seen = Vec::new();
        for e in &self.entries {
            if !seen.contains(&e.setting) {
                seen.push(e.setting);
            }
        }
        seen
    }

    /// Front recomputed over every entry that does not belong to `setting`.
    pub fn front_without(&self, setting: usize) -> Vec<Vec<f64>> {
        let rest: Vec<&[f64]> = self
            .entries
            .iter()
            .filter(|e| e.setting != setting)
            .map(|e| e.values.as_slice())
            .collect();
        non_dominated(&rest)
            .into_iter()
            .map(|i| rest[i].to_vec())
            .collect()
    }

    /// Hypervolume lost when all observations of `setting` are removed from
    /// the archive. Previously shadowed points of other settings resurface
    /// in the recomputed front.
    pub fn setting_contribution(&self, setting: usize) -> Result<f64> {
        if !self.entries.iter().any(|e| e.setting == setting) {
            return Err(Error::UnknownSetting(setting));
        }
        let owns_front = self
            .front
            .iter()
            .any(|&i| self.entries[i].setting == setting);
        if !owns_front {
            return Ok(0.0);
        }
        let full = self.hypervolume();
        let reduced = hypervolume(&self.front_without(setting), &self.reference);
        Ok((full - reduced).max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn front_set(a: &ParetoArchive) -> Vec<Vec<f64>> {
        let mut f = a.front_values();
        f.sort_by(|x, y| x.partial_cmp(y).unwrap());
        f
    }

    #[test]
    fn incomparable_points_coexist() {
        let mut a = ParetoArchive::new(2);
        a.update_front(0, 1, vec![1.0, 3.0]);
        assert!(a.update_front(1, 1, vec![2.0, 1.0]));
        assert_eq!(front_set(&a), vec![vec![1.0, 3.0], vec![2.0, 1.0]]);
    }

    #[test]
    fn dominator_evicts() {
        let mut a = ParetoArchive::new(2);
        a.update_front(0, 1, vec![1.0, 3.0]);
        a.update_front(1, 1, vec![2.0, 1.0]);
        a.update_front(2, 1, vec![0.5, 0.5]);
        assert_eq!(front_set(&a), vec![vec![0.5, 0.5]]);
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn dominated_point_excluded() {
        let mut a = ParetoArchive::new(2);
        a.update_front(0, 1, vec![1.0, 3.0]);
        assert!(!a.update_front(0, 2, vec![5.0, 5.0]));
        assert_eq!(front_set(&a), vec![vec![1.0, 3.0]]);
    }

    #[test]
    fn duplicates_stored_not_fronted() {
        let mut a = ParetoArchive::new(2);
        a.update_front(0, 1, vec![1.0, 3.0]);
        assert!(!a.update_front(1, 1, vec![1.0, 3.0]));
        assert_eq!(a.len(), 2);
        assert_eq!(a.front_indices(), &[0]);
    }

    #[test]
    fn contribution_example() {
        let mut a = ParetoArchive::with_reference(vec![4.0, 4.0]);
        a.update_front(0, 1, vec![1.0, 3.0]);
        a.update_front(1, 1, vec![2.0, 1.0]);
        assert_eq!(a.setting_contribution(0).unwrap(), 1.0);
        assert_eq!(a.setting_contribution(1).unwrap(), 4.0);
        assert!(matches!(a.setting_contribution(7), Err(Error::UnknownSetting(7))));
    }

    #[test]
    fn contribution_of_non_front_setting_is_zero() {
        let mut a = ParetoArchive::with_reference(vec![4.0, 4.0]);
        a.update_front(0, 1, vec![1.0, 1.0]);
        a.update_front(1, 1, vec![2.0, 2.0]);
        assert_eq!(a.setting_contribution(1).unwrap(), 0.0);
    }

    #[test]
    fn resurfacing_reduces_contribution() {
        // Setting 0 owns (1,1) which shadows setting 1's (1.5,1.5).
        let mut a = ParetoArchive::with_reference(vec![4.0, 4.0]);
        a.update_front(0, 1, vec![1.0, 1.0]);
        a.update_front(1, 1, vec![1.5, 1.5]);
        a.update_front(2, 1, vec![0.5, 3.0]);
        a.update_front(3, 1, vec![3.0, 0.5]);
        let raw_hvi = a.hypervolume()
            - hypervolume(&[vec![0.5, 3.0], vec![3.0, 0.5]], a.reference());
        let contribution = a.setting_contribution(0).unwrap();
        assert!(contribution < raw_hvi);
        // HV with (1,1): [0.5,1)x[3,4)=0.5, [1,3)x[1,4)=6, [3,4)x[0.5,4)=3.5 -> 10
        // HV with (1.5,1.5): [0.5,1.5)x1=1, [1.5,3)x2.5=3.75, [3,4)x3.5=3.5 -> 8.25
        assert_eq!(a.hypervolume(), 10.0);
        assert_eq!(contribution, 1.75);
        assert_eq!(raw_hvi, 4.0);
    }
}
