//! Marginal-likelihood fitting of kernel hyperparameters.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gp::{GpModel, Standardizer, JITTER_STEPS};
use super::kernel::{scale_epoch, KernelSpec, QueryPair, TemporalKind};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::seeding::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Start points evaluated before the local search.
    pub restarts: usize,
    /// Likelihood evaluations allowed to the local search.
    pub max_evaluations: usize,
    /// Training points used for the likelihood; larger sets are strided.
    pub max_points: usize,
    /// Lower bound of the noise variance search. Lower it for noise-free
    /// data that must be interpolated tightly.
    pub noise_floor: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            restarts: 5,
            max_evaluations: 120,
            max_points: 160,
            noise_floor: super::kernel::bounds::NOISE_VARIANCE.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: GpModel,
    /// Log marginal likelihood at each start point.
    pub start_mll: Vec<f64>,
    /// Log marginal likelihood at the returned hyperparameters.
    pub mll: f64,
}

/// Pairwise squared differences, precomputed once per fit.
struct Likelihood {
    n: usize,
    d: usize,
    kind: TemporalKind,
    /// `sq[dim][pair]` over the lower triangle, row-major.
    sq: Vec<Vec<f64>>,
    s: Vec<f64>,
    y: Vec<f64>,
}

impl Likelihood {
    fn new(inputs: &[&QueryPair], y: Vec<f64>, t_max: usize, kind: TemporalKind) -> Self {
        let n = inputs.len();
        let d = inputs.first().map_or(0, |z| z.x.len());
        let mut sq = vec![Vec::with_capacity(n * (n + 1) / 2); d];
        for i in 0..n {
            for j in 0..=i {
                for (dim, v) in sq.iter_mut().enumerate() {
                    v.push((inputs[i].x[dim] - inputs[j].x[dim]).powi(2));
                }
            }
        }
        let s = inputs.iter().map(|z| scale_epoch(z.t, t_max)).collect();
        Self {
            n,
            d,
            kind,
            sq,
            s,
            y,
        }
    }

    fn eval(&self, log_params: &[f64]) -> f64 {
        let spec = KernelSpec::from_log_params(self.d, self.kind, log_params);
        let inv: Vec<f64> = spec
            .lengthscales
            .iter()
            .map(|l| -0.5 / (l * l))
            .collect();
        let n = self.n;
        let mut k = DMatrix::zeros(n, n);
        let mut p = 0;
        for i in 0..n {
            for j in 0..=i {
                let acc: f64 = self.sq.iter().zip(&inv).map(|(sq, w)| sq[p] * w).sum();
                p += 1;
                let v = spec.signal_variance * acc.exp() * spec.temporal.eval(self.s[i], self.s[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] += spec.noise_variance;
        }
        let mean_diag = k.diagonal().sum() / n as f64;
        let mut chol = k.clone().cholesky();
        let mut step = 0;
        while chol.is_none() && step < JITTER_STEPS {
            let mut a = k.clone();
            let jitter = 1e-8 * 10f64.powi(step) * mean_diag;
            for i in 0..n {
                a[(i, i)] += jitter;
            }
            chol = a.cholesky();
            step += 1;
        }
        let Some(chol) = chol else {
            return f64::NEG_INFINITY;
        };
        let y = nalgebra::DVector::from_column_slice(&self.y);
        let alpha = chol.solve(&y);
        let logdet: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
        let mll = -0.5 * y.dot(&alpha) - logdet - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
        if mll.is_finite() {
            mll
        } else {
            f64::NEG_INFINITY
        }
    }
}

fn stride(n: usize, cap: usize) -> Vec<usize> {
    if n <= cap {
        (0..n).collect()
    } else {
        (0..cap).map(|i| i * n / cap).collect()
    }
}

/// Fits one GP to `(inputs, y)` by maximizing the log marginal likelihood
/// of the standardized targets. `warm` replaces the default first start.
pub fn fit_gp(
    inputs: Vec<QueryPair>,
    y: &[f64],
    t_max: usize,
    kind: TemporalKind,
    warm: Option<&KernelSpec>,
    config: &FitConfig,
) -> Result<FitOutcome> {
    if inputs.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            got: y.len(),
        });
    }
    let distinct = inputs.iter().skip(1).any(|z| *z != inputs[0]);
    if inputs.len() < 2 || !distinct {
        return Err(Error::Config(
            "fitting needs at least two distinct training inputs".into(),
        ));
    }
    let d = inputs[0].x.len();
    let st = Standardizer::fit(y);
    let idx = stride(inputs.len(), config.max_points.max(2));
    let sub: Vec<&QueryPair> = idx.iter().map(|&i| &inputs[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| st.forward(y[i])).collect();
    let lik = Likelihood::new(&sub, ys, t_max, kind);
    let mut bounds = KernelSpec::log_bounds(d, kind);
    if let Some(noise) = bounds.last_mut() {
        noise.0 = config.noise_floor.ln().min(noise.1);
    }

    let mut starts = Vec::with_capacity(config.restarts.max(1));
    let first = match warm {
        Some(w) if w.d() == d && w.temporal.kind() == kind => w.to_log_params(),
        _ => KernelSpec::default_for(d, kind).to_log_params(),
    };
    starts.push(clamp(first, &bounds));
    let mut rng = substream(config.seed, "gp-fit-starts", d as u64);
    while starts.len() < config.restarts.max(1) {
        starts.push(bounds.iter().map(|(lo, hi)| rng.gen_range(*lo..*hi)).collect());
    }
    let start_mll: Vec<f64> = starts.iter().map(|p| lik.eval(p)).collect();
    let best = crate::par::argmax(&start_mll).unwrap_or(0);
    let (params, mll) = nelder_mead(
        |p| lik.eval(p),
        &starts[best],
        &bounds,
        config.max_evaluations,
    );
    let spec = KernelSpec::from_log_params(d, kind, &params);
    let model = GpModel::with_standardizer(spec, t_max, inputs, y, st)?;
    let mll = if idx.len() == model.len() {
        model.log_marginal_likelihood()
    } else {
        mll
    };
    Ok(FitOutcome {
        model,
        start_mll,
        mll,
    })
}

/// Fits one GP per objective on shared inputs. `ys[i]` holds objective `i`.
pub fn fit_models(
    inputs: &[QueryPair],
    ys: &[Vec<f64>],
    t_max: usize,
    kinds: &[TemporalKind],
    warm: Option<&[KernelSpec]>,
    config: &FitConfig,
    exec: Execution,
) -> Result<Vec<GpModel>> {
    map_indexed(exec, ys.len(), |i| {
        fit_gp(
            inputs.to_vec(),
            &ys[i],
            t_max,
            kinds[i],
            warm.and_then(|w| w.get(i)),
            config,
        )
        .map(|o| o.model)
    })
    .into_iter()
    .collect()
}

fn clamp(mut p: Vec<f64>, bounds: &[(f64, f64)]) -> Vec<f64> {
    for (v, (lo, hi)) in p.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
    p
}

/// Maximizes `f` over a box with Nelder–Mead, projecting trial points onto
/// the box. Returns the best point and value.
pub fn nelder_mead<F>(f: F, x0: &[f64], bounds: &[(f64, f64)], max_evals: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    // Minimize the negation; non-finite values rank last.
    let g = |p: &[f64]| {
        let v = -f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let x0 = clamp(x0.to_vec(), bounds);
    let v0 = g(&x0);
    simplex.push((x0.clone(), v0));
    let mut evals = 1;
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = 0.1 * (hi - lo);
        let mut p = x0.clone();
        p[i] = if p[i] + step <= hi { p[i] + step } else { p[i] - step };
        let v = g(&p);
        evals += 1;
        simplex.push((p, v));
    }
    // Adaptive coefficients suit higher dimensions.
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < 1e-10 * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let p = centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp(p, bounds)
        };
        let xr = along(alpha);
        let fr = g(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(alpha * gamma);
            let fe = g(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(alpha * rho);
                let fc = g(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = g(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, v) in simplex.iter_mut().skip(1) {
                    for (pi, bi) in p.iter_mut().zip(&best) {
                        *pi = bi + sigma * (*pi - bi);
                    }
                    *v = g(p);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (p, v) = simplex.swap_remove(0);
    (p, -v)
}
