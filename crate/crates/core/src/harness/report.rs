//! Convergence bands, box-plot values and summaries as CSV and JSON.
//!
//! `convergence_{axis}.csv`: `problem,optimizer,axis,x,mean,sd,se,lower,upper,trials`
//! with `lower`/`upper` at two standard errors.
//!
//! `boxplot.csv`: `problem,optimizer,trial,value,normalized` where `value` is
//! the final log10 hypervolume difference, min–max normalized per problem
//! when `normalized` is true.
//!
//! `summary.json`: final-value statistics per problem and optimizer.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::metrics::{
    aggregate, estimate_true_front, grid, mean_sd, normalize, trial_series, Axis, BandPoint,
    SeriesPoint, TrueFront,
};
use super::trial::TrialData;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    pub label: String,
    pub trials: Vec<usize>,
    pub series: Vec<Vec<SeriesPoint>>,
    pub band: Vec<BandPoint>,
    /// Final log10 hypervolume difference per trial.
    pub finals: Vec<f64>,
    /// `finals` normalized over every group of the problem.
    pub normalized: Vec<f64>,
    pub total_epochs: Vec<usize>,
    pub total_cost: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemReport {
    pub problem: String,
    pub truth: TrueFront,
    pub axis: Axis,
    pub groups: Vec<GroupReport>,
}

impl ProblemReport {
    pub fn group(&self, label: &str) -> Option<&GroupReport> {
        self.groups.iter().find(|g| g.label == label)
    }
}

/// Groups trials by problem and optimizer label (first-appearance order)
/// and computes series against each problem's shared true front.
pub fn build_report(trials: &[TrialData], axis: Axis) -> Result<Vec<ProblemReport>> {
    let mut problems: Vec<String> = Vec::new();
    for t in trials {
        if !problems.contains(&t.header.problem) {
            problems.push(t.header.problem.clone());
        }
    }
    let mut out = Vec::new();
    for problem in problems {
        let mine: Vec<&TrialData> = trials.iter().filter(|t| t.header.problem == problem).collect();
        let owned: Vec<TrialData> = mine.iter().map(|t| (*t).clone()).collect();
        let truth = estimate_true_front(&owned)?;
        let mut labels: Vec<String> = Vec::new();
        for t in &mine {
            if !labels.contains(&t.header.label) {
                labels.push(t.header.label.clone());
            }
        }
        let mut groups = Vec::new();
        for label in labels {
            let members: Vec<&&TrialData> = mine.iter().filter(|t| t.header.label == label).collect();
            let series = members
                .iter()
                .map(|t| trial_series(t, &truth))
                .collect::<Result<Vec<_>>>()?;
            groups.push(GroupReport {
                label,
                trials: members.iter().map(|t| t.header.trial).collect(),
                finals: series
                    .iter()
                    .map(|s| s.last().expect("non-empty series").log_hv_difference)
                    .collect(),
                total_epochs: series.iter().map(|s| s.last().map_or(0, |p| p.epochs)).collect(),
                total_cost: series.iter().map(|s| s.last().map_or(0.0, |p| p.cost)).collect(),
                series,
                band: Vec::new(),
                normalized: Vec::new(),
            });
        }
        let all: Vec<&[SeriesPoint]> = groups
            .iter()
            .flat_map(|g| g.series.iter().map(Vec::as_slice))
            .collect();
        let shared = grid(&all, axis);
        let finals: Vec<f64> = groups.iter().flat_map(|g| g.finals.iter().copied()).collect();
        let mut normalized = normalize(&finals).into_iter();
        for g in &mut groups {
            g.band = aggregate(&g.series, axis, &shared);
            g.normalized = normalized.by_ref().take(g.finals.len()).collect();
        }
        out.push(ProblemReport {
            problem,
            truth,
            axis,
            groups,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub problem: String,
    pub optimizer: String,
    pub axis: Axis,
    pub x: f64,
    pub mean: f64,
    pub sd: f64,
    pub se: f64,
    pub lower: f64,
    pub upper: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotRow {
    pub problem: String,
    pub optimizer: String,
    pub trial: usize,
    pub value: f64,
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub trials: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub mean_epochs: f64,
    pub mean_cost: f64,
}

pub fn convergence_rows(reports: &[ProblemReport]) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for r in reports {
        for g in &r.groups {
            for b in &g.band {
                rows.push(ConvergenceRow {
                    problem: r.problem.clone(),
                    optimizer: g.label.clone(),
                    axis: r.axis,
                    x: b.x,
                    mean: b.mean,
                    sd: b.sd,
                    se: b.se,
                    lower: b.lower,
                    upper: b.upper,
                    trials: b.trials,
                });
            }
        }
    }
    rows
}

pub fn boxplot_rows(reports: &[ProblemReport], normalized: bool) -> Vec<BoxplotRow> {
    let mut rows = Vec::new();
    for r in reports {
        for g in &r.groups {
            let values = if normalized { &g.normalized } else { &g.finals };
            for (trial, value) in g.trials.iter().zip(values) {
                rows.push(BoxplotRow {
                    problem: r.problem.clone(),
                    optimizer: g.label.clone(),
                    trial: *trial,
                    value: *value,
                    normalized,
                });
            }
        }
    }
    rows
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn summary(reports: &[ProblemReport]) -> BTreeMap<String, BTreeMap<String, GroupSummary>> {
    let mut out = BTreeMap::new();
    for r in reports {
        let mut groups = BTreeMap::new();
        for g in &r.groups {
            let (mean, sd) = mean_sd(&g.finals);
            let n = g.finals.len().max(1) as f64;
            groups.insert(
                g.label.clone(),
                GroupSummary {
                    trials: g.finals.len(),
                    mean,
                    sd,
                    median: median(&g.finals),
                    min: g.finals.iter().cloned().fold(f64::INFINITY, f64::min),
                    max: g.finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    mean_epochs: g.total_epochs.iter().sum::<usize>() as f64 / n,
                    mean_cost: g.total_cost.iter().sum::<f64>() / n,
                },
            );
        }
        out.insert(r.problem.clone(), groups);
    }
    out
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

/// Writes the convergence CSV for the reports' axis, the box-plot CSV and
/// the JSON summary into `dir`. Returns the written paths.
pub fn export_report(reports: &[ProblemReport], normalized: bool, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let axis = reports.first().map_or(Axis::Iter, |r| r.axis);
    let conv = dir.join(format!("convergence_{}.csv", axis.label()));
    write_csv(&conv, &convergence_rows(reports))?;
    let boxes = dir.join("boxplot.csv");
    write_csv(&boxes, &boxplot_rows(reports, normalized))?;
    let sum = dir.join("summary.json");
    std::fs::write(&sum, serde_json::to_vec_pretty(&summary(reports))?)?;
    Ok(vec![conv, boxes, sum])
}

pub fn read_convergence_csv(path: &Path) -> Result<Vec<ConvergenceRow>> {
    read_csv(path)
}

pub fn read_boxplot_csv(path: &Path) -> Result<Vec<BoxplotRow>> {
    read_csv(path)
}
