use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tmobo::harness::{
    build_report, estimate_true_front, export_report, load_results, run_suite, Axis,
    ExperimentConfig,
};
use tmobo::problems::presets;

#[derive(Parser)]
#[command(name = "tmobo", version, about = "Trajectory-based multi-objective Bayesian optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (problem, optimizer, trial) cell of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the worker count of the config.
        #[arg(long)]
        workers: Option<usize>,
        /// Skip cells the manifest already marks done.
        #[arg(long)]
        resume: bool,
    },
    /// Write convergence and box-plot tables for a results directory.
    Report {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "iter")]
        axis: String,
        /// Min-max normalize final values per problem.
        #[arg(long)]
        normalize: bool,
        /// Output directory; defaults to `<results>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the estimated true front of every problem in a results directory.
    Front {
        #[arg(long)]
        results: PathBuf,
    },
    /// Problem presets.
    Problems {
        #[command(subcommand)]
        action: ProblemsAction,
    },
    /// Check core routines against brute-force oracles.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ProblemsAction {
    List,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            workers,
            resume,
        } => {
            let mut cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let s = run_suite(&cfg, resume)?;
            println!(
                "{} completed, {} skipped, {} failed -> {}",
                s.completed,
                s.skipped,
                s.failed,
                cfg.output_dir.display()
            );
            if s.failed > 0 {
                bail!("{} cells failed; see the manifest", s.failed);
            }
        }
        Command::Report {
            results,
            axis,
            normalize,
            out,
        } => {
            let Some(axis) = Axis::parse(&axis) else {
                bail!("unknown axis `{axis}` (iter, epochs, cost)");
            };
            let trials = load_results(&results)?;
            let reports = build_report(&trials, axis)?;
            let dir = out.unwrap_or_else(|| results.join("report"));
            for p in export_report(&reports, normalize, &dir)? {
                println!("{}", p.display());
            }
        }
        Command::Front { results } => {
            let trials = load_results(&results)?;
            let mut problems: Vec<String> = trials.iter().map(|t| t.header.problem.clone()).collect();
            problems.dedup();
            problems.sort();
            problems.dedup();
            let mut out = serde_json::Map::new();
            for p in problems {
                let mine: Vec<_> = trials.iter().filter(|t| t.header.problem == p).cloned().collect();
                let truth = estimate_true_front(&mine)?;
                out.insert(
                    p,
                    serde_json::json!({
                        "front": truth.front,
                        "reference": truth.reference,
                        "hypervolume": truth.hypervolume,
                    }),
                );
            }
            let path = results.join("true_fronts.json");
            std::fs::write(&path, serde_json::to_vec_pretty(&out)?)?;
            println!("{}", path.display());
        }
        Command::Problems {
            action: ProblemsAction::List,
        } => {
            for p in presets() {
                println!("{}\td={}\tk={}\tt_max={}", p.name, p.d, p.k, p.t_max);
            }
        }
        Command::Selftest { seed } => {
            let results = tmobo::selftest::run(seed);
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                bail!("{failed} self-test checks failed");
            }
        }
    }
    Ok(())
}
