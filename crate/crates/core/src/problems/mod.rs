//! Epoch-dependent test problems.
//!
//! A synthetic problem multiplies each base objective by a learning-curve
//! factor, `f_i(x, t) = f̄_i(x) · g_i(t)`, and adds Gaussian noise whose
//! standard deviation is a fraction of the objective's range. Tabular
//! problems replay recorded trajectories instead.

mod benchmarks;
mod curves;
mod session;
mod tabular;

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use benchmarks::{base_objectives, Benchmark};
pub use curves::{curve, CurveKind};
pub use session::{Observation, TrainingSession, Trajectory};
pub use tabular::{write_tabular, TabularTable};

use crate::error::{Error, Result};
use crate::sobol::Sobol;

/// Number of low-discrepancy `(x, t)` samples behind objective ranges.
pub const RANGE_SAMPLES: usize = 10_000;
/// Scramble seed of the range-estimation sample.
pub const RANGE_SEED: u64 = 0;

/// Prior knowledge about an objective's learning curve, used to pick the
/// temporal kernel of its surrogate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Loss,
    Cost,
    #[default]
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMatch {
    #[default]
    Exact,
    Nearest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub d: usize,
    pub k: usize,
    pub t_max: usize,
    pub benchmark: Benchmark,
    /// One curve per objective.
    #[serde(default)]
    pub curves: Vec<CurveKind>,
    /// Noise standard deviation per objective, as a fraction of its range.
    #[serde(default)]
    pub noise: Vec<f64>,
    /// Native `(low, high)` bounds per coordinate; unit interval when empty.
    #[serde(default)]
    pub bounds: Vec<(f64, f64)>,
    #[serde(default)]
    pub objective_kinds: Vec<ObjectiveKind>,
    /// Objective whose per-epoch value is accumulated as training cost.
    #[serde(default)]
    pub cost_objective: Option<usize>,
    /// CSV table for `benchmark = "tabular"`.
    #[serde(default)]
    pub table: Option<PathBuf>,
    #[serde(default)]
    pub table_match: TableMatch,
}

impl ProblemSpec {
    /// Synthetic problem with unit bounds and the same noise fraction on
    /// every objective.
    pub fn synthetic(
        benchmark: Benchmark,
        d: usize,
        t_max: usize,
        curves: Vec<CurveKind>,
        noise: f64,
    ) -> Self {
        let k = curves.len();
        let name = format!(
            "{}({})",
            benchmark.label(),
            curves.iter().map(|c| c.label()).collect::<Vec<_>>().join(",")
        );
        Self {
            name,
            d,
            k,
            t_max,
            benchmark,
            curves,
            noise: vec![noise; k],
            bounds: Vec::new(),
            objective_kinds: Vec::new(),
            cost_objective: None,
            table: None,
            table_match: TableMatch::Exact,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn objective_kind(&self, i: usize) -> ObjectiveKind {
        self.objective_kinds.get(i).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidProblem(format!("{}: {m}", self.name)));
        if self.d < 1 {
            return fail("d must be at least 1".into());
        }
        if self.k < 2 {
            return fail("k must be at least 2".into());
        }
        if self.t_max < 1 {
            return fail("t_max must be at least 1".into());
        }
        if self.benchmark != Benchmark::Tabular {
            if self.curves.len() != self.k {
                return fail(format!("expected {} curve ids, got {}", self.k, self.curves.len()));
            }
            self.benchmark.check_shape(self.d, self.k)?;
        } else if self.table.is_none() {
            return fail("tabular problems need a table path".into());
        }
        if !self.noise.is_empty() && self.noise.len() != self.k {
            return fail(format!("expected {} noise fractions, got {}", self.k, self.noise.len()));
        }
        if self.noise.iter().any(|n| n.is_nan() || *n < 0.0) {
            return fail("noise fractions must be non-negative".into());
        }
        if !self.bounds.is_empty() {
            if self.bounds.len() != self.d {
                return fail(format!("expected {} bounds, got {}", self.d, self.bounds.len()));
            }
            if self.bounds.iter().any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo >= hi) {
                return fail("every bound needs low < high".into());
            }
        }
        if let Some(c) = self.cost_objective {
            if c >= self.k {
                return fail(format!("cost objective {c} out of range"));
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
enum Source {
    Synthetic,
    Table(TabularTable),
}

/// An immutable, shareable problem instance.
#[derive(Debug)]
pub struct Problem {
    spec: ProblemSpec,
    source: Source,
    ranges: OnceLock<Vec<f64>>,
}

impl Problem {
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let source = match spec.benchmark {
            Benchmark::Tabular => {
                let path = spec.table.clone().expect("validated");
                Source::Table(TabularTable::load(&path)?)
            }
            _ => Source::Synthetic,
        };
        let mut spec = spec;
        if let Source::Table(table) = &source {
            if table.d() != spec.d || table.k() != spec.k || table.t_max() != spec.t_max {
                return Err(Error::InvalidProblem(format!(
                    "{}: table has d = {}, k = {}, t_max = {} but the problem declares d = {}, k = {}, t_max = {}",
                    spec.name,
                    table.d(),
                    table.k(),
                    table.t_max(),
                    spec.d,
                    spec.k,
                    spec.t_max
                )));
            }
            if spec.curves.is_empty() {
                spec.curves = vec![CurveKind::None; spec.k];
            }
        }
        Ok(Self {
            spec,
            source,
            ranges: OnceLock::new(),
        })
    }

    /// Tabular problem whose shape is read from the file itself.
    pub fn load_tabular(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let table = TabularTable::load(&path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "tabular".into());
        let spec = ProblemSpec {
            name,
            d: table.d(),
            k: table.k(),
            t_max: table.t_max(),
            benchmark: Benchmark::Tabular,
            curves: vec![CurveKind::None; table.k()],
            noise: Vec::new(),
            bounds: Vec::new(),
            objective_kinds: Vec::new(),
            cost_objective: None,
            table: Some(path),
            table_match: TableMatch::Exact,
        };
        spec.validate()?;
        Ok(Self {
            spec,
            source: Source::Table(table),
            ranges: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn t_max(&self) -> usize {
        self.spec.t_max
    }

    /// Listed settings of a tabular problem; `None` for continuous problems.
    pub fn feasible_settings(&self) -> Option<&[Vec<f64>]> {
        match &self.source {
            Source::Table(t) => Some(t.settings()),
            Source::Synthetic => None,
        }
    }

    /// Maps a unit-cube point onto the feasible set: identity for synthetic
    /// problems, nearest listed setting for tabular ones.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match &self.source {
            Source::Table(t) => t.settings()[t.nearest(x)].clone(),
            Source::Synthetic => x.to_vec(),
        }
    }

    fn native(&self, x: &[f64]) -> Vec<f64> {
        if self.spec.bounds.is_empty() {
            return x.to_vec();
        }
        x.iter()
            .zip(&self.spec.bounds)
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect()
    }

    /// Noise-free objectives at `(x, t)`.
    pub fn evaluate(&self, x: &[f64], t: usize) -> Result<Vec<f64>> {
        if x.len() != self.spec.d {
            return Err(Error::DimensionMismatch {
                expected: self.spec.d,
                got: x.len(),
            });
        }
        if t < 1 || t > self.spec.t_max {
            return Err(Error::InvalidProblem(format!(
                "epoch {t} outside 1..={}",
                self.spec.t_max
            )));
        }
        match &self.source {
            Source::Table(table) => {
                let row = match self.spec.table_match {
                    TableMatch::Exact => table
                        .exact(x)
                        .ok_or_else(|| Error::UnlistedSetting(x.to_vec()))?,
                    TableMatch::Nearest => table.nearest(x),
                };
                Ok(table.values(row, t).to_vec())
            }
            Source::Synthetic => {
                let base = base_objectives(self.spec.benchmark, &self.native(x), self.spec.k)?;
                let tm = self.spec.t_max as f64;
                Ok(base
                    .iter()
                    .zip(&self.spec.curves)
                    .map(|(f, c)| f * curve(*c, t as f64, tm))
                    .collect())
            }
        }
    }

    /// Per-objective range (max − min) of the noise-free objectives.
    ///
    /// Synthetic problems use a fixed scrambled-Sobol sample of
    /// [`RANGE_SAMPLES`] `(x, t)` pairs; tabular problems use the whole
    /// table. Computed once and cached.
    pub fn objective_ranges(&self) -> &[f64] {
        self.ranges.get_or_init(|| match &self.source {
            Source::Table(t) => t.ranges(),
            Source::Synthetic => self.sampled_ranges(),
        })
    }

    fn sampled_ranges(&self) -> Vec<f64> {
        let k = self.spec.k;
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        let mut seq = Sobol::scrambled(self.spec.d + 1, RANGE_SEED)
            .expect("problem dimension within the Sobol table");
        for _ in 0..RANGE_SAMPLES {
            let p = seq.next_point();
            let (x, u) = p.split_at(self.spec.d);
            let t = ((u[0] * self.spec.t_max as f64) as usize + 1).min(self.spec.t_max);
            let f = self.evaluate(x, t).expect("synthetic evaluation in domain");
            for i in 0..k {
                lo[i] = lo[i].min(f[i]);
                hi[i] = hi[i].max(f[i]);
            }
        }
        lo.iter().zip(&hi).map(|(a, b)| b - a).collect()
    }

    /// Noise standard deviation per objective.
    pub fn noise_std(&self) -> Vec<f64> {
        if self.spec.noise.is_empty() {
            return vec![0.0; self.spec.k];
        }
        self.spec
            .noise
            .iter()
            .zip(self.objective_ranges())
            .map(|(f, r)| f * r)
            .collect()
    }

    /// Starts training `x` from scratch with its own noise stream.
    pub fn start_session(self: &Arc<Self>, x: Vec<f64>, noise_seed: u64) -> TrainingSession {
        TrainingSession::new(Arc::clone(self), x, noise_seed)
    }
}

/// The synthetic suite: every benchmark with four curve combinations, d = 5,
/// t_max = 50 and 1% noise.
///
/// Combination labels use `M` for a monotonic curve (decreasing on the
/// first objective, increasing otherwise), `Q` for quadratic and `P` for
/// periodic.
pub fn presets() -> Vec<ProblemSpec> {
    let combos = [("M", "M"), ("M", "Q"), ("M", "P"), ("Q", "P")];
    let mut out = Vec::new();
    for bench in [
        Benchmark::Zdt1,
        Benchmark::Zdt2,
        Benchmark::Dtlz1,
        Benchmark::Dtlz2,
        Benchmark::Dtlz7,
    ] {
        for (a, b) in combos {
            let curves = vec![label_curve(a, 0), label_curve(b, 1)];
            let name = format!("{}({a}-{b})", bench.label());
            out.push(ProblemSpec::synthetic(bench, 5, 50, curves, 0.01).with_name(name));
        }
    }
    out
}

/// Looks up a preset by name, e.g. `"ZDT1(M-P)"`.
pub fn preset(name: &str) -> Option<ProblemSpec> {
    presets().into_iter().find(|p| p.name == name)
}

fn label_curve(label: &str, objective: usize) -> CurveKind {
    match label {
        "M" if objective == 0 => CurveKind::MDec,
        "M" => CurveKind::MInc,
        "Q" => CurveKind::Quad,
        "P" => CurveKind::Periodic,
        _ => CurveKind::None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zdt1_mm(noise: f64) -> Problem {
        Problem::new(ProblemSpec::synthetic(
            Benchmark::Zdt1,
            5,
            50,
            vec![CurveKind::MInc, CurveKind::MInc],
            noise,
        ))
        .unwrap()
    }

    #[test]
    fn evaluate_is_product_of_base_and_curve() {
        let p = zdt1_mm(0.0);
        let f = p.evaluate(&[1.0, 0.0, 0.0, 0.0, 0.0], 25).unwrap();
        assert_eq!(f, vec![1.0, 0.0]);
        let x = [0.3, 0.2, 0.1, 0.9, 0.4];
        let base = base_objectives(Benchmark::Zdt1, &x, 2).unwrap();
        for t in 1..=50 {
            let g = curve(CurveKind::MInc, t as f64, 50.0);
            let f = p.evaluate(&x, t).unwrap();
            assert_eq!(f, vec![base[0] * g, base[1] * g]);
        }
    }

    #[test]
    fn ranges_are_cached_and_positive() {
        let p = zdt1_mm(0.01);
        let a = p.objective_ranges().to_vec();
        assert!(a.iter().all(|r| *r > 0.0));
        assert_eq!(a, p.objective_ranges());
        let again = zdt1_mm(0.01);
        assert_eq!(a, again.objective_ranges());
        let std = p.noise_std();
        assert!((std[0] - 0.01 * a[0]).abs() < 1e-15);
    }

    #[test]
    fn constant_objective_has_zero_range() {
        // DTLZ7's first objective is x_1; with bounds pinned to a sliver it
        // is nearly constant, and a curve of kind None keeps it so.
        let mut spec = ProblemSpec::synthetic(
            Benchmark::Dtlz7,
            2,
            5,
            vec![CurveKind::None, CurveKind::None],
            0.5,
        );
        spec.bounds = vec![(0.5, 0.5 + f64::EPSILON), (0.0, 1.0)];
        let p = Problem::new(spec).unwrap();
        assert!(p.objective_ranges()[0] <= f64::EPSILON);
    }

    #[test]
    fn validation_errors() {
        let mut spec = ProblemSpec::synthetic(Benchmark::Zdt1, 5, 50, vec![CurveKind::MInc], 0.0);
        assert!(Problem::new(spec.clone()).is_err());
        spec.curves.push(CurveKind::MInc);
        spec.noise = vec![0.0, 0.0];
        spec.t_max = 0;
        assert!(Problem::new(spec).is_err());
    }

    #[test]
    fn presets_cover_all_benchmarks() {
        let p = presets();
        assert_eq!(p.len(), 20);
        let zdt1_mm = preset("ZDT1(M-M)").unwrap();
        assert_eq!(zdt1_mm.curves, vec![CurveKind::MDec, CurveKind::MInc]);
        for spec in p {
            Problem::new(spec).unwrap();
        }
    }
}
