//! Trajectory-based multi-objective Bayesian optimization.
//!
//! Hyperparameter tuning with the training epoch as an explicit decision
//! variable: every epoch observed while training a setting is a candidate
//! trade-off, not just the final one. The crate provides the Pareto and
//! hypervolume machinery, epoch-dependent test problems, Gaussian-process
//! trajectory surrogates, the trajectory expected-hypervolume-improvement
//! acquisition, early stopping, the optimizer loops with their baselines,
//! and an experiment harness.

pub mod acquisition;
pub mod error;
pub mod harness;
pub mod optimizers;
pub mod oracles;
pub mod par;
pub mod pareto;
pub mod problems;
pub mod seeding;
pub mod selftest;
pub mod sobol;
pub mod stopping;
pub mod surrogate;

pub use error::{Error, Result};
