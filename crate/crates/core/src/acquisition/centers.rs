use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::ParetoArchive;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterState {
    /// Archive setting id.
    pub setting: usize,
    pub x: Vec<f64>,
    pub radius: f64,
    pub failures: usize,
    pub active: bool,
    /// Visit counter at registration; later visits win ties.
    pub visit: usize,
}

/// Search state of every visited setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterBook {
    centers: Vec<CenterState>,
    gamma_max: f64,
    max_failures: usize,
    visits: usize,
}

impl CenterBook {
    pub fn new(gamma_max: f64, max_failures: usize) -> Self {
        Self {
            centers: Vec::new(),
            gamma_max,
            max_failures: max_failures.max(1),
            visits: 0,
        }
    }

    /// Adds a newly sampled setting at full radius.
    pub fn register(&mut self, setting: usize, x: Vec<f64>) {
        self.visits += 1;
        let visit = self.visits;
        if let Some(c) = self.centers.iter_mut().find(|c| c.setting == setting) {
            c.visit = visit;
            return;
        }
        self.centers.push(CenterState {
            setting,
            x,
            radius: self.gamma_max,
            failures: 0,
            active: true,
            visit,
        });
    }

    pub fn get(&self, setting: usize) -> Option<&CenterState> {
        self.centers.iter().find(|c| c.setting == setting)
    }

    pub fn states(&self) -> &[CenterState] {
        &self.centers
    }

    /// The active center with the largest contribution to the archive's
    /// hypervolume; ties go to the latest visit. When every center has been
    /// retired, all are reactivated at full radius first.
    pub fn select_center(&mut self, archive: &ParetoArchive) -> Result<usize> {
        if self.centers.is_empty() {
            return Err(Error::Config("no visited setting to search around".into()));
        }
        if self.centers.iter().all(|c| !c.active) {
            for c in &mut self.centers {
                c.active = true;
                c.failures = 0;
                c.radius = self.gamma_max;
            }
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for c in self.centers.iter().filter(|c| c.active) {
            let v = archive.setting_contribution(c.setting).unwrap_or(0.0);
            let better = match best {
                None => true,
                Some((bv, bvisit, _)) => v > bv || (v == bv && c.visit > bvisit),
            };
            if better {
                best = Some((v, c.visit, c.setting));
            }
        }
        Ok(best.expect("at least one active center").2)
    }

    /// Success keeps the radius and clears the failure count; failure
    /// halves the radius and retires the center after too many in a row.
    pub fn report_outcome(&mut self, setting: usize, improved: bool) -> Result<()> {
        let max_failures = self.max_failures;
        let c = self
            .centers
            .iter_mut()
            .find(|c| c.setting == setting)
            .ok_or(Error::UnknownSetting(setting))?;
        if improved {
            c.failures = 0;
        } else {
            c.radius *= 0.5;
            c.failures += 1;
            if c.failures >= max_failures {
                c.active = false;
            }
        }
        Ok(())
    }
}
