//! Per-objective Gaussian processes over `(setting, epoch)` pairs.

mod fit;
mod gp;
mod kernel;
mod sampling;

pub use fit::{fit_gp, fit_models, nelder_mead, FitConfig, FitOutcome};
pub use gp::{cholesky_jittered, GpModel, PosteriorBelief, Standardizer, JITTER_STEPS};
pub use kernel::{
    bounds, kernel_eval, scale_epoch, KernelSpec, QueryPair, TemporalKernel, TemporalKind,
};
pub use sampling::{
    factor_psd, sample_from_beliefs, sample_trajectories, trajectory_beliefs, BaseNormals,
    TrajectorySamples,
};
