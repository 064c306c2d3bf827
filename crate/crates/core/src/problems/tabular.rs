//! Recorded learning-curve tables.
//!
//! File layout: a CSV with header `setting_id,x0,..,x{d-1},epoch,f0,..,f{k-1}`
//! and one row per (setting, epoch). Every setting must cover epochs
//! `1..=t_max`. Coordinates are min–max normalized per column into the unit
//! cube the optimizers work in.

use std::collections::HashMap;
use std::path::Path;

use super::Problem;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct TabularTable {
    ids: Vec<String>,
    native: Vec<Vec<f64>>,
    settings: Vec<Vec<f64>>,
    /// `values[setting][epoch - 1][objective]`
    values: Vec<Vec<Vec<f64>>>,
    k: usize,
    t_max: usize,
}

impl TabularTable {
    pub fn load(path: &Path) -> Result<Self> {
        let fail = |reason: String| Error::TabularLoad {
            path: path.to_path_buf(),
            reason,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_path(path)
            .map_err(|e| fail(e.to_string()))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| fail(e.to_string()))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let (d, k) = parse_header(&header).map_err(&fail)?;

        let mut index: HashMap<String, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut native: Vec<Vec<f64>> = Vec::new();
        let mut rows: Vec<Vec<(usize, Vec<f64>)>> = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let line = line + 2;
            let record = record.map_err(|e| fail(format!("line {line}: {e}")))?;
            let num = |i: usize| -> Result<f64> {
                let field = record[i].trim();
                field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    fail(format!(
                        "line {line}: column `{}` is not a finite number: `{field}`",
                        header[i]
                    ))
                })
            };
            let id = record[0].trim().to_string();
            let coords = (1..=d).map(num).collect::<Result<Vec<_>>>()?;
            let epoch_raw = num(d + 1)?;
            if epoch_raw.fract() != 0.0 || epoch_raw < 1.0 {
                return Err(fail(format!("line {line}: epoch must be a positive integer")));
            }
            let epoch = epoch_raw as usize;
            let f = (d + 2..d + 2 + k).map(num).collect::<Result<Vec<_>>>()?;
            let slot = *index.entry(id.clone()).or_insert_with(|| {
                ids.push(id.clone());
                native.push(coords.clone());
                rows.push(Vec::new());
                ids.len() - 1
            });
            if native[slot] != coords {
                return Err(fail(format!(
                    "line {line}: setting `{id}` listed with different coordinates"
                )));
            }
            rows[slot].push((epoch, f));
        }
        if ids.is_empty() {
            return Err(fail("no data rows".into()));
        }

        let t_max = rows
            .iter()
            .flat_map(|r| r.iter().map(|(e, _)| *e))
            .max()
            .unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len());
        for (slot, mut r) in rows.into_iter().enumerate() {
            r.sort_by_key(|(e, _)| *e);
            let epochs: Vec<usize> = r.iter().map(|(e, _)| *e).collect();
            if epochs != (1..=t_max).collect::<Vec<_>>() {
                return Err(fail(format!(
                    "setting `{}` must cover epochs 1..={t_max} exactly once, found {:?}",
                    ids[slot], epochs
                )));
            }
            values.push(r.into_iter().map(|(_, f)| f).collect());
        }

        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for c in &native {
            for j in 0..d {
                lo[j] = lo[j].min(c[j]);
                hi[j] = hi[j].max(c[j]);
            }
        }
        let settings = native
            .iter()
            .map(|c| {
                (0..d)
                    .map(|j| {
                        if hi[j] > lo[j] {
                            (c[j] - lo[j]) / (hi[j] - lo[j])
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();

        Ok(Self {
            ids,
            native,
            settings,
            values,
            k,
            t_max,
        })
    }

    pub fn d(&self) -> usize {
        self.settings.first().map_or(0, Vec::len)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn native_settings(&self) -> &[Vec<f64>] {
        &self.native
    }

    /// Normalized settings.
    pub fn settings(&self) -> &[Vec<f64>] {
        &self.settings
    }

    pub fn values(&self, row: usize, epoch: usize) -> &[f64] {
        &self.values[row][epoch - 1]
    }

    pub fn trajectory(&self, row: usize) -> &[Vec<f64>] {
        &self.values[row]
    }

    pub fn exact(&self, x: &[f64]) -> Option<usize> {
        self.settings.iter().position(|s| s.as_slice() == x)
    }

    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, s) in self.settings.iter().enumerate() {
            let d2: f64 = s.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best.0
    }

    pub(super) fn ranges(&self) -> Vec<f64> {
        (0..self.k)
            .map(|i| {
                let vals = self.values.iter().flatten().map(|f| f[i]);
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                    (l.min(v), h.max(v))
                });
                hi - lo
            })
            .collect()
    }
}

fn parse_header(header: &[String]) -> std::result::Result<(usize, usize), String> {
    if header.first().map(String::as_str) != Some("setting_id") {
        return Err("first column must be `setting_id`".into());
    }
    let epoch_at = header
        .iter()
        .position(|h| h == "epoch")
        .ok_or_else(|| "missing `epoch` column".to_string())?;
    let d = epoch_at - 1;
    let k = header.len() - epoch_at - 1;
    if d < 1 {
        return Err("need at least one coordinate column".into());
    }
    if k < 2 {
        return Err("need at least two objective columns".into());
    }
    for j in 0..d {
        if header[1 + j] != format!("x{j}") {
            return Err(format!("expected column `x{j}`, found `{}`", header[1 + j]));
        }
    }
    for i in 0..k {
        if header[epoch_at + 1 + i] != format!("f{i}") {
            return Err(format!(
                "expected column `f{i}`, found `{}`",
                header[epoch_at + 1 + i]
            ));
        }
    }
    Ok((d, k))
}

/// Writes the noise-free trajectories of `settings` on `problem` as a table.
/// Setting ids are `s0`, `s1`, ...
pub fn write_tabular(path: &Path, problem: &Problem, settings: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["setting_id".to_string()];
    header.extend((0..problem.d()).map(|j| format!("x{j}")));
    header.push("epoch".into());
    header.extend((0..problem.k()).map(|i| format!("f{i}")));
    w.write_record(&header)?;
    for (i, x) in settings.iter().enumerate() {
        for t in 1..=problem.t_max() {
            let f = problem.evaluate(x, t)?;
            let mut row = vec![format!("s{i}")];
            row.extend(x.iter().map(|v| v.to_string()));
            row.push(t.to_string());
            row.extend(f.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
