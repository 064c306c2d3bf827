use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::kernel::{scale_epoch, KernelSpec, QueryPair};
use crate::error::{Error, Result};

/// Affine map between objective units and the standardized targets the GP
/// is fitted on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub mean: f64,
    pub scale: f64,
}

impl Standardizer {
    pub const IDENTITY: Standardizer = Standardizer {
        mean: 0.0,
        scale: 1.0,
    };

    pub fn fit(y: &[f64]) -> Self {
        if y.is_empty() {
            return Self::IDENTITY;
        }
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        let scale = if sd > 1e-12 * mean.abs().max(1.0) { sd } else { 1.0 };
        Self { mean, scale }
    }

    #[inline]
    pub fn forward(&self, y: f64) -> f64 {
        (y - self.mean) / self.scale
    }

    #[inline]
    pub fn inverse(&self, z: f64) -> f64 {
        z * self.scale + self.mean
    }
}

/// Jitter ladder: `1e-8 · 10^j · mean(diag)` for `j = 0..=6`.
pub const JITTER_STEPS: i32 = 7;

/// Lower Cholesky factor of a symmetric PSD matrix, escalating diagonal
/// jitter until the factorization succeeds. Returns the factor and the
/// jitter that was added. An all-zero matrix factors to zero.
pub fn cholesky_jittered(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), 0.0));
    }
    let mean_diag = m.diagonal().iter().map(|v| v.max(0.0)).sum::<f64>() / n as f64;
    if mean_diag == 0.0 && m.iter().all(|v| *v == 0.0) {
        return Ok((DMatrix::zeros(n, n), 0.0));
    }
    if let Some(c) = m.clone().cholesky() {
        return Ok((c.l(), 0.0));
    }
    for j in 0..JITTER_STEPS {
        let jitter = 1e-8 * 10f64.powi(j) * mean_diag;
        let mut a = m.clone();
        for i in 0..n {
            a[(i, i)] += jitter;
        }
        if let Some(c) = a.cholesky() {
            return Ok((c.l(), jitter));
        }
    }
    Err(Error::Factorization)
}

/// Joint Gaussian belief over a list of queries, in objective units.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorBelief {
    pub mean: Vec<f64>,
    pub cov: DMatrix<f64>,
}

impl PosteriorBelief {
    pub fn variance(&self, i: usize) -> f64 {
        self.cov[(i, i)].max(0.0)
    }

    pub fn std_dev(&self, i: usize) -> f64 {
        self.variance(i).sqrt()
    }

    /// Conditions on a noisy observation `y` of coordinate `i`.
    pub fn condition(&mut self, i: usize, y: f64, noise_variance: f64) {
        let n = self.mean.len();
        let s = self.cov[(i, i)].max(0.0) + noise_variance;
        if s <= 0.0 {
            // Exact observation of an already certain coordinate.
            return;
        }
        let col: Vec<f64> = (0..n).map(|r| self.cov[(r, i)]).collect();
        let resid = y - self.mean[i];
        for (m, c) in self.mean.iter_mut().zip(&col) {
            *m += c / s * resid;
        }
        for c in 0..n {
            for r in 0..n {
                self.cov[(r, c)] -= col[r] * col[c] / s;
            }
        }
        clamp_diagonal(&mut self.cov);
    }
}

fn clamp_diagonal(cov: &mut DMatrix<f64>) {
    for i in 0..cov.nrows() {
        if cov[(i, i)] < 0.0 {
            cov[(i, i)] = 0.0;
        }
    }
}

fn symmetrize(cov: &mut DMatrix<f64>) {
    let n = cov.nrows();
    for c in 0..n {
        for r in c + 1..n {
            let v = 0.5 * (cov[(r, c)] + cov[(c, r)]);
            cov[(r, c)] = v;
            cov[(c, r)] = v;
        }
    }
}

/// Structures behind fast trajectory posteriors. Training points are
/// reordered so that each epoch occupies a contiguous block.
#[derive(Debug)]
struct TrajectoryCache {
    /// Training indices sorted by epoch.
    order: Vec<usize>,
    /// `bins[e]` is the block of `order` holding epoch `e + 1`.
    bins: Vec<std::ops::Range<usize>>,
    /// `(K + σ²I)⁻¹` permuted by `order`.
    precision: DMatrix<f64>,
    alpha: Vec<f64>,
    temporal: DMatrix<f64>,
}

/// A single-output GP over query pairs with fixed hyperparameters.
#[derive(Debug)]
pub struct GpModel {
    spec: KernelSpec,
    t_max: usize,
    inputs: Vec<QueryPair>,
    scaled_t: Vec<f64>,
    standardizer: Standardizer,
    targets: DVector<f64>,
    chol: DMatrix<f64>,
    jitter: f64,
    alpha: DVector<f64>,
    cache: OnceLock<TrajectoryCache>,
}

impl Clone for GpModel {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            t_max: self.t_max,
            inputs: self.inputs.clone(),
            scaled_t: self.scaled_t.clone(),
            standardizer: self.standardizer,
            targets: self.targets.clone(),
            chol: self.chol.clone(),
            jitter: self.jitter,
            alpha: self.alpha.clone(),
            cache: OnceLock::new(),
        }
    }
}

impl GpModel {
    /// The prior: no training data, zero mean.
    pub fn prior(spec: KernelSpec, t_max: usize) -> Self {
        Self {
            spec,
            t_max,
            inputs: Vec::new(),
            scaled_t: Vec::new(),
            standardizer: Standardizer::IDENTITY,
            targets: DVector::zeros(0),
            chol: DMatrix::zeros(0, 0),
            jitter: 0.0,
            alpha: DVector::zeros(0),
            cache: OnceLock::new(),
        }
    }

    /// Conditions the prior on `(inputs, y)`, standardizing `y` first.
    pub fn new(spec: KernelSpec, t_max: usize, inputs: Vec<QueryPair>, y: &[f64]) -> Result<Self> {
        let st = Standardizer::fit(y);
        Self::with_standardizer(spec, t_max, inputs, y, st)
    }

    pub fn with_standardizer(
        spec: KernelSpec,
        t_max: usize,
        inputs: Vec<QueryPair>,
        y: &[f64],
        standardizer: Standardizer,
    ) -> Result<Self> {
        if inputs.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: y.len(),
            });
        }
        let d = spec.d();
        if let Some(bad) = inputs.iter().find(|z| z.x.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.x.len(),
            });
        }
        let scaled_t: Vec<f64> = inputs.iter().map(|z| scale_epoch(z.t, t_max)).collect();
        let targets = DVector::from_iterator(y.len(), y.iter().map(|v| standardizer.forward(*v)));
        let n = inputs.len();
        let mut k = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in j..n {
                let v = spec.eval_scaled(&inputs[i].x, scaled_t[i], &inputs[j].x, scaled_t[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(j, j)] += spec.noise_variance;
        }
        let (chol, jitter) = cholesky_jittered(&k)?;
        let alpha = solve_cholesky(&chol, &targets);
        Ok(Self {
            spec,
            t_max,
            inputs,
            scaled_t,
            standardizer,
            targets,
            chol,
            jitter,
            alpha,
            cache: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn inputs(&self) -> &[QueryPair] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn standardizer(&self) -> Standardizer {
        self.standardizer
    }

    /// Observation noise variance in objective units.
    pub fn noise_variance(&self) -> f64 {
        self.spec.noise_variance * self.standardizer.scale.powi(2)
    }

    /// Training targets in objective units.
    pub fn targets(&self) -> Vec<f64> {
        self.targets
            .iter()
            .map(|v| self.standardizer.inverse(*v))
            .collect()
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.inputs.len() as f64;
        let fit = self.targets.dot(&self.alpha);
        let logdet: f64 = self.chol.diagonal().iter().map(|v| v.ln()).sum();
        -0.5 * fit - logdet - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }

    fn cross(&self, queries: &[QueryPair]) -> (DMatrix<f64>, Vec<f64>) {
        let n = self.inputs.len();
        let qs: Vec<f64> = queries
            .iter()
            .map(|q| scale_epoch(q.t, self.t_max))
            .collect();
        let mut kq = DMatrix::zeros(n, queries.len());
        for (c, q) in queries.iter().enumerate() {
            for r in 0..n {
                kq[(r, c)] =
                    self.spec
                        .eval_scaled(&self.inputs[r].x, self.scaled_t[r], &q.x, qs[c]);
            }
        }
        (kq, qs)
    }

    /// Joint posterior over `queries`.
    pub fn posterior(&self, queries: &[QueryPair]) -> PosteriorBelief {
        let m = queries.len();
        let (kq, qs) = self.cross(queries);
        let mut cov = DMatrix::zeros(m, m);
        for c in 0..m {
            for r in c..m {
                let v = self
                    .spec
                    .eval_scaled(&queries[r].x, qs[r], &queries[c].x, qs[c]);
                cov[(r, c)] = v;
                cov[(c, r)] = v;
            }
        }
        let mut mean: Vec<f64> = vec![0.0; m];
        if !self.inputs.is_empty() {
            let mu = kq.tr_mul(&self.alpha);
            mean.copy_from_slice(mu.as_slice());
            let v = self
                .chol
                .solve_lower_triangular(&kq)
                .expect("Cholesky factor has a positive diagonal");
            cov -= v.tr_mul(&v);
        }
        self.finish(mean, cov)
    }

    /// Posterior mean and variance of each query on its own.
    pub fn posterior_marginals(&self, queries: &[QueryPair]) -> (Vec<f64>, Vec<f64>) {
        let (kq, qs) = self.cross(queries);
        let s2 = self.standardizer.scale.powi(2);
        let mut var: Vec<f64> = queries
            .iter()
            .zip(&qs)
            .map(|(q, s)| self.spec.eval_scaled(&q.x, *s, &q.x, *s))
            .collect();
        let mut mean = vec![0.0; queries.len()];
        if !self.inputs.is_empty() {
            let mu = kq.tr_mul(&self.alpha);
            mean.copy_from_slice(mu.as_slice());
            let v = self
                .chol
                .solve_lower_triangular(&kq)
                .expect("Cholesky factor has a positive diagonal");
            for (c, vc) in var.iter_mut().enumerate() {
                *vc -= v.column(c).norm_squared();
            }
        }
        let mean = mean
            .iter()
            .map(|m| self.standardizer.inverse(*m))
            .collect();
        let var = var.iter().map(|v| (v * s2).max(0.0)).collect();
        (mean, var)
    }

    fn finish(&self, mean: Vec<f64>, mut cov: DMatrix<f64>) -> PosteriorBelief {
        let s2 = self.standardizer.scale.powi(2);
        cov *= s2;
        symmetrize(&mut cov);
        clamp_diagonal(&mut cov);
        PosteriorBelief {
            mean: mean
                .iter()
                .map(|m| self.standardizer.inverse(*m))
                .collect(),
            cov,
        }
    }

    fn cache(&self) -> &TrajectoryCache {
        self.cache.get_or_init(|| {
            let n = self.inputs.len();
            let tm = self.t_max;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&j| self.inputs[j].t);
            let mut bins = Vec::with_capacity(tm);
            let mut at = 0;
            for e in 1..=tm {
                let start = at;
                while at < n && self.inputs[order[at]].t == e {
                    at += 1;
                }
                bins.push(start..at);
            }
            let precision = if n == 0 {
                DMatrix::zeros(0, 0)
            } else {
                let l_inv = self
                    .chol
                    .solve_lower_triangular(&DMatrix::identity(n, n))
                    .expect("Cholesky factor has a positive diagonal");
                let full = l_inv.tr_mul(&l_inv);
                DMatrix::from_fn(n, n, |r, c| full[(order[r], order[c])])
            };
            let alpha = order.iter().map(|&j| self.alpha[j]).collect();
            let temporal = DMatrix::from_fn(tm, tm, |a, b| {
                self.spec
                    .temporal
                    .eval(scale_epoch(a + 1, tm), scale_epoch(b + 1, tm))
            });
            TrajectoryCache {
                order,
                bins,
                precision,
                alpha,
                temporal,
            }
        })
    }

    /// Joint posterior over epochs `1..=t_max` at setting `x`.
    ///
    /// Uses the product structure of the kernel: every training input falls
    /// into one of `t_max` epoch bins, so the cross-covariance factors
    /// through the `t_max × t_max` temporal matrix and a query costs `O(n²)`.
    pub fn trajectory_posterior(&self, x: &[f64]) -> PosteriorBelief {
        let cache = self.cache();
        let tm = self.t_max;
        let n = self.inputs.len();
        let sf = self.spec.signal_variance;
        let mut cov = cache.temporal.clone() * sf;
        let mut mean = vec![0.0; tm];
        if n > 0 {
            let u: Vec<f64> = cache
                .order
                .iter()
                .map(|&j| sf * self.spec.spatial(x, &self.inputs[j].x))
                .collect();
            let mut w = DVector::<f64>::zeros(tm);
            // C[e, e'] = Σ_{j ∈ e, l ∈ e'} u_j A_jl u_l
            let mut c = DMatrix::<f64>::zeros(tm, tm);
            for (e2, r2) in cache.bins.iter().enumerate() {
                for j in r2.clone() {
                    w[e2] += u[j] * cache.alpha[j];
                    if u[j] == 0.0 {
                        continue;
                    }
                    let col = cache.precision.column(j);
                    let col = col.as_slice();
                    for (e1, r1) in cache.bins.iter().enumerate() {
                        if r1.is_empty() {
                            continue;
                        }
                        let acc: f64 = col[r1.clone()]
                            .iter()
                            .zip(&u[r1.clone()])
                            .map(|(a, b)| a * b)
                            .sum();
                        c[(e1, e2)] += acc * u[j];
                    }
                }
            }
            let mu = &cache.temporal * w;
            mean.copy_from_slice(mu.as_slice());
            let kc = &cache.temporal * c;
            cov -= kc * cache.temporal.transpose();
        }
        self.finish(mean, cov)
    }

    /// The same model with one more observation, hyperparameters and
    /// standardization frozen. Extends the Cholesky factor in `O(n²)`.
    pub fn condition_on(&self, z: QueryPair, y: f64) -> Result<GpModel> {
        let n = self.inputs.len();
        let s = scale_epoch(z.t, self.t_max);
        let kz: DVector<f64> = DVector::from_iterator(
            n,
            (0..n).map(|r| {
                self.spec
                    .eval_scaled(&self.inputs[r].x, self.scaled_t[r], &z.x, s)
            }),
        );
        let kzz = self.spec.eval_scaled(&z.x, s, &z.x, s) + self.spec.noise_variance + self.jitter;
        let l = if n == 0 {
            DVector::zeros(0)
        } else {
            self.chol
                .solve_lower_triangular(&kz)
                .expect("Cholesky factor has a positive diagonal")
        };
        let pivot = kzz - l.norm_squared();
        let mut inputs = self.inputs.clone();
        inputs.push(z);
        let mut y_all = self.targets();
        y_all.push(y);
        if pivot <= 1e-12 * kzz {
            return GpModel::with_standardizer(
                self.spec.clone(),
                self.t_max,
                inputs,
                &y_all,
                self.standardizer,
            );
        }
        let mut chol = self.chol.clone().resize(n + 1, n + 1, 0.0);
        for c in 0..n {
            chol[(n, c)] = l[c];
        }
        chol[(n, n)] = pivot.sqrt();
        let mut scaled_t = self.scaled_t.clone();
        scaled_t.push(s);
        let mut targets = self.targets.clone().resize_vertically(n + 1, 0.0);
        targets[n] = self.standardizer.forward(y);
        let alpha = solve_cholesky(&chol, &targets);
        Ok(GpModel {
            spec: self.spec.clone(),
            t_max: self.t_max,
            inputs,
            scaled_t,
            standardizer: self.standardizer,
            targets,
            chol,
            jitter: self.jitter,
            alpha,
            cache: OnceLock::new(),
        })
    }
}

fn solve_cholesky(l: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if l.nrows() == 0 {
        return DVector::zeros(0);
    }
    let y = l
        .solve_lower_triangular(b)
        .expect("Cholesky factor has a positive diagonal");
    l.tr_solve_lower_triangular(&y)
        .expect("Cholesky factor has a positive diagonal")
}
