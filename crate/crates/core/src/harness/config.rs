use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{Algorithm, OptimizerConfig};
use crate::problems::{preset, Problem, ProblemSpec};

/// Overrides `output_dir` when set.
pub const OUTPUT_DIR_ENV: &str = "TMOBO_OUTPUT_DIR";

/// A preset name or a full problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Preset(String),
    Spec(Box<ProblemSpec>),
}

impl ProblemRef {
    pub fn resolve(&self) -> Result<ProblemSpec> {
        match self {
            ProblemRef::Preset(name) => {
                preset(name).ok_or_else(|| Error::Config(format!("unknown problem preset `{name}`")))
            }
            ProblemRef::Spec(spec) => Ok((**spec).clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPair {
    pub problem: ProblemRef,
    pub optimizer: OptimizerConfig,
    /// Name of the optimizer in outputs; defaults to the algorithm id, with
    /// the replication count appended for replicated runs.
    #[serde(default)]
    pub label: Option<String>,
}

impl RunPair {
    pub fn label(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None if self.optimizer.algorithm == Algorithm::TmoboP => {
                format!("tmobo_p{}", self.optimizer.replications)
            }
            None => self.optimizer.algorithm.label().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub runs: Vec<RunPair>,
    pub trials: usize,
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_workers() -> usize {
    1
}

impl ExperimentConfig {
    /// Reads a JSON config; the output directory environment variable takes
    /// precedence over the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            config.output_dir = PathBuf::from(dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.runs.is_empty() {
            return Err(Error::Config("no runs configured".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for pair in &self.runs {
            let spec = pair.problem.resolve()?;
            Problem::new(spec.clone())?;
            pair.optimizer.validate()?;
            if !seen.insert((spec.name.clone(), pair.label())) {
                return Err(Error::Config(format!(
                    "duplicate run `{}` on `{}`; give one a distinct label",
                    pair.label(),
                    spec.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let ok = r#"{"runs":[{"problem":"ZDT1(M-M)","optimizer":{"algorithm":"random_t","iterations":2}}],
                     "trials":1,"output_dir":"/tmp/x"}"#;
        let c: ExperimentConfig = serde_json::from_str(ok).unwrap();
        c.validate().unwrap();
        assert_eq!(c.runs[0].label(), "random_t");
        let bad = ok.replace("\"trials\":1", "\"trials\":1,\"bogus\":3");
        assert!(serde_json::from_str::<ExperimentConfig>(&bad).is_err());
        let bad = ok.replace("\"iterations\":2", "\"iterations\":2,\"bogus\":3");
        assert!(serde_json::from_str::<ExperimentConfig>(&bad).is_err());
    }

    #[test]
    fn replicated_label_carries_count() {
        let pair = RunPair {
            problem: ProblemRef::Preset("ZDT1(M-M)".into()),
            optimizer: OptimizerConfig {
                algorithm: Algorithm::TmoboP,
                replications: 4,
                ..OptimizerConfig::default()
            },
            label: None,
        };
        assert_eq!(pair.label(), "tmobo_p4");
    }

    #[test]
    fn unknown_preset_is_reported() {
        let r = ProblemRef::Preset("nope".into()).resolve();
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
