//! Experiment orchestration, metrics and result files.

mod config;
mod metrics;
mod report;
mod suite;
mod trial;

pub use config::{ExperimentConfig, ProblemRef, RunPair, OUTPUT_DIR_ENV};
pub use metrics::{
    aggregate, estimate_true_front, grid, log_difference, mean_sd, normalize, sample_at,
    trial_series, Axis, BandPoint, SeriesPoint, TrueFront, LOG_FLOOR,
};
pub use report::{
    boxplot_rows, build_report, convergence_rows, export_report, median, read_boxplot_csv,
    read_convergence_csv, summary, BoxplotRow, ConvergenceRow, GroupReport, GroupSummary,
    ProblemReport,
};
pub use suite::{load_results, run_suite, CellEntry, CellStatus, Manifest, SuiteSummary, MANIFEST};
pub use trial::{read_trial, TrialData, TrialHeader, TrialWriter};
