//! JSON-lines trial files: a header line, then one record per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{IterationRecord, RunMetadata};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialHeader {
    pub problem: String,
    /// Optimizer label within the suite.
    pub label: String,
    pub trial: usize,
    pub seed: u64,
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    pub header: TrialHeader,
    pub records: Vec<IterationRecord>,
}

/// Streams a trial file as records arrive.
pub struct TrialWriter {
    out: BufWriter<File>,
}

impl TrialWriter {
    pub fn create(path: &Path, header: &TrialHeader) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        Ok(Self { out })
    }

    pub fn push(&mut self, record: &IterationRecord) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_trial(path: &Path) -> Result<TrialData> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Harness(format!("{}: empty trial file", path.display())))??;
    let header: TrialHeader = serde_json::from_str(&first)?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(serde_json::from_str(&line)?);
        }
    }
    Ok(TrialData { header, records })
}
