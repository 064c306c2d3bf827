//! Product kernels over `(setting, epoch)`.
//!
//! `K((x, t), (x', t')) = σ_f² · exp(−½ Σ_j ((x_j − x'_j) / ℓ_j)²) · k_T(s, s')`
//! where `s = (t − 1) / (t_max − 1)` puts epochs on the same unit scale as
//! the settings.

use serde::{Deserialize, Serialize};

use crate::problems::ObjectiveKind;

/// A setting paired with an epoch index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPair {
    pub x: Vec<f64>,
    pub t: usize,
}

impl QueryPair {
    pub fn new(x: Vec<f64>, t: usize) -> Self {
        Self { x, t }
    }
}

/// Rescales epoch `t ∈ 1..=t_max` onto `[0, 1]`.
pub fn scale_epoch(t: usize, t_max: usize) -> f64 {
    if t_max <= 1 {
        0.0
    } else {
        (t as f64 - 1.0) / (t_max as f64 - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalKind {
    Rbf,
    ExpDecay,
    Linear,
}

impl TemporalKind {
    /// Loss-like curves get the exponential-decay kernel, cost-like curves
    /// the linear one, anything else the squared exponential.
    pub fn for_objective(kind: ObjectiveKind) -> Self {
        match kind {
            ObjectiveKind::Loss => TemporalKind::ExpDecay,
            ObjectiveKind::Cost => TemporalKind::Linear,
            ObjectiveKind::Other => TemporalKind::Rbf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TemporalKernel {
    Rbf { lengthscale: f64 },
    /// `β^α / (s + s' + β)^α`
    ExpDecay { alpha: f64, beta: f64 },
    /// `c₀ + c₁ · s · s'`
    Linear { offset: f64, slope: f64 },
}

impl TemporalKernel {
    pub fn default_for(kind: TemporalKind) -> Self {
        match kind {
            TemporalKind::Rbf => TemporalKernel::Rbf { lengthscale: 0.5 },
            TemporalKind::ExpDecay => TemporalKernel::ExpDecay {
                alpha: 1.0,
                beta: 1.0,
            },
            TemporalKind::Linear => TemporalKernel::Linear {
                offset: 1.0,
                slope: 1.0,
            },
        }
    }

    pub fn kind(&self) -> TemporalKind {
        match self {
            TemporalKernel::Rbf { .. } => TemporalKind::Rbf,
            TemporalKernel::ExpDecay { .. } => TemporalKind::ExpDecay,
            TemporalKernel::Linear { .. } => TemporalKind::Linear,
        }
    }

    #[inline]
    pub fn eval(&self, s: f64, s2: f64) -> f64 {
        match *self {
            TemporalKernel::Rbf { lengthscale } => {
                let r = (s - s2) / lengthscale;
                (-0.5 * r * r).exp()
            }
            TemporalKernel::ExpDecay { alpha, beta } => (beta / (s + s2 + beta)).powf(alpha),
            TemporalKernel::Linear { offset, slope } => offset + slope * s * s2,
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            TemporalKernel::Rbf { lengthscale } => vec![lengthscale],
            TemporalKernel::ExpDecay { alpha, beta } => vec![alpha, beta],
            TemporalKernel::Linear { offset, slope } => vec![offset, slope],
        }
    }

    fn from_params(kind: TemporalKind, p: &[f64]) -> Self {
        match kind {
            TemporalKind::Rbf => TemporalKernel::Rbf { lengthscale: p[0] },
            TemporalKind::ExpDecay => TemporalKernel::ExpDecay {
                alpha: p[0],
                beta: p[1],
            },
            TemporalKind::Linear => TemporalKernel::Linear {
                offset: p[0],
                slope: p[1],
            },
        }
    }
}

/// Hyperparameter search box, in natural units; the fit works on logs.
pub mod bounds {
    pub const LENGTHSCALE: (f64, f64) = (5e-3, 10.0);
    pub const SIGNAL_VARIANCE: (f64, f64) = (1e-3, 10.0);
    pub const NOISE_VARIANCE: (f64, f64) = (1e-6, 1.0);
    pub const DECAY_ALPHA: (f64, f64) = (0.1, 5.0);
    pub const DECAY_BETA: (f64, f64) = (0.1, 10.0);
    pub const LINEAR_COEFF: (f64, f64) = (1e-3, 10.0);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub temporal: TemporalKernel,
    pub noise_variance: f64,
}

impl KernelSpec {
    pub fn default_for(d: usize, kind: TemporalKind) -> Self {
        Self {
            lengthscales: vec![0.5; d],
            signal_variance: 1.0,
            temporal: TemporalKernel::default_for(kind),
            noise_variance: 1e-2,
        }
    }

    pub fn d(&self) -> usize {
        self.lengthscales.len()
    }

    /// Squared-exponential part without the signal variance.
    #[inline]
    pub fn spatial(&self, x: &[f64], x2: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((a, b), l) in x.iter().zip(x2).zip(&self.lengthscales) {
            let r = (a - b) / l;
            acc += r * r;
        }
        (-0.5 * acc).exp()
    }

    /// Kernel value on pre-scaled epochs.
    #[inline]
    pub fn eval_scaled(&self, x: &[f64], s: f64, x2: &[f64], s2: f64) -> f64 {
        self.signal_variance * self.spatial(x, x2) * self.temporal.eval(s, s2)
    }

    /// Log-space parameter vector: lengthscales, signal variance, temporal
    /// parameters, noise variance.
    pub fn to_log_params(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.lengthscales.iter().map(|v| v.ln()).collect();
        p.push(self.signal_variance.ln());
        p.extend(self.temporal.params().iter().map(|v| v.ln()));
        p.push(self.noise_variance.ln());
        p
    }

    pub fn from_log_params(d: usize, kind: TemporalKind, p: &[f64]) -> Self {
        let e: Vec<f64> = p.iter().map(|v| v.exp()).collect();
        let nt = p.len() - d - 2;
        Self {
            lengthscales: e[..d].to_vec(),
            signal_variance: e[d],
            temporal: TemporalKernel::from_params(kind, &e[d + 1..d + 1 + nt]),
            noise_variance: e[d + 1 + nt],
        }
    }

    /// Log-space box matching [`to_log_params`](Self::to_log_params).
    pub fn log_bounds(d: usize, kind: TemporalKind) -> Vec<(f64, f64)> {
        let ln = |(a, b): (f64, f64)| (a.ln(), b.ln());
        let mut b = vec![ln(bounds::LENGTHSCALE); d];
        b.push(ln(bounds::SIGNAL_VARIANCE));
        match kind {
            TemporalKind::Rbf => b.push(ln(bounds::LENGTHSCALE)),
            TemporalKind::ExpDecay => {
                b.push(ln(bounds::DECAY_ALPHA));
                b.push(ln(bounds::DECAY_BETA));
            }
            TemporalKind::Linear => {
                b.push(ln(bounds::LINEAR_COEFF));
                b.push(ln(bounds::LINEAR_COEFF));
            }
        }
        b.push(ln(bounds::NOISE_VARIANCE));
        b
    }
}

/// `K(z, z')` with epochs rescaled by `t_max`.
pub fn kernel_eval(spec: &KernelSpec, z: &QueryPair, z2: &QueryPair, t_max: usize) -> f64 {
    spec.eval_scaled(
        &z.x,
        scale_epoch(z.t, t_max),
        &z2.x,
        scale_epoch(z2.t, t_max),
    )
}
