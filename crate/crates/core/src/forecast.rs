//! Forecasters evaluated by the cross-validation procedures.
//!
//! A [`Forecaster`] is fit on a training window and yields a model whose
//! `predict(x, horizon)` gives the forecast for a point with features `x`
//! lying `horizon` steps after the end of the training window. Regression
//! models ignore the horizon; GARCH(1,1) ignores the features.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::series::SeriesView;

pub trait Forecaster {
    type Model: Predict;

    fn fit(&self, train: SeriesView<'_>) -> Result<Self::Model>;
}

pub trait Predict {
    fn predict(&self, x: &[f64], horizon: usize) -> f64;
}

/// Affine model `intercept + w . x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefs: Vec<f64>,
}

impl Predict for LinearModel {
    fn predict(&self, x: &[f64], _horizon: usize) -> f64 {
        self.intercept + self.coefs.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Centered Gram matrix `X'X / n` and moment vector `X'y / n`, plus the
/// column and outcome means that were removed (zeros without intercept).
struct Moments {
    p: usize,
    gram: Vec<f64>,
    xty: Vec<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
    yty: f64,
}

fn moments(train: SeriesView<'_>, center: bool) -> Moments {
    let n = train.len();
    let p = train.dim();
    let nf = n as f64;
    let mut x_mean = vec![0.0; p];
    let mut y_mean = 0.0;
    if center {
        for (x, y) in train.rows() {
            for (m, v) in x_mean.iter_mut().zip(x) {
                *m += v;
            }
            y_mean += y;
        }
        x_mean.iter_mut().for_each(|m| *m /= nf);
        y_mean /= nf;
    }
    let mut gram = vec![0.0; p * p];
    let mut xty = vec![0.0; p];
    let mut yty = 0.0;
    let mut xc = vec![0.0; p];
    for (x, y) in train.rows() {
        for j in 0..p {
            xc[j] = x[j] - x_mean[j];
        }
        let yc = y - y_mean;
        yty += yc * yc;
        for j in 0..p {
            xty[j] += xc[j] * yc;
            let row = &mut gram[j * p..(j + 1) * p];
            for k in j..p {
                row[k] += xc[j] * xc[k];
            }
        }
    }
    for j in 0..p {
        for k in j..p {
            gram[j * p + k] /= nf;
            gram[k * p + j] = gram[j * p + k];
        }
        xty[j] /= nf;
    }
    Moments {
        p,
        gram,
        xty,
        x_mean,
        y_mean,
        yty: yty / nf,
    }
}

impl Moments {
    fn model(&self, w: Vec<f64>) -> LinearModel {
        let intercept = self.y_mean - self.x_mean.iter().zip(&w).map(|(m, c)| m * c).sum::<f64>();
        LinearModel { intercept, coefs: w }
    }
}

/// Ridge regression, `min sum (y - b - x.w)^2 + lambda |w|^2` (intercept
/// unpenalized).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeSpec {
    pub lambda: f64,
    pub include_intercept: bool,
}

impl Default for RidgeSpec {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            include_intercept: true,
        }
    }
}

pub fn fit_ridge(train: SeriesView<'_>, spec: &RidgeSpec) -> Result<LinearModel> {
    if !(spec.lambda >= 0.0 && spec.lambda.is_finite()) {
        return Err(Error::param("lambda", "ridge penalty must be finite and >= 0"));
    }
    if train.is_empty() {
        return Err(Error::SeriesTooShort { n: 0, required: 1 });
    }
    let mo = moments(train, spec.include_intercept);
    let n = train.len() as f64;
    let p = mo.p;
    // Work with unnormalized sums: (X'X + lambda I) w = X'y.
    let mut a: Vec<f64> = mo.gram.iter().map(|g| g * n).collect();
    for j in 0..p {
        a[j * p + j] += spec.lambda;
    }
    let b: Vec<f64> = mo.xty.iter().map(|v| v * n).collect();
    let w = solve_spd(&a, &b, p).map_err(|e| match e {
        Error::Singular => Error::param(
            "lambda",
            "normal equations are singular; use a ridge penalty lambda > 0",
        ),
        other => other,
    })?;
    Ok(mo.model(w))
}

/// How the Lasso penalty is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LassoPenalty {
    Fixed(f64),
    /// Fraction of `lambda_max`, the smallest penalty with an all-zero fit,
    /// computed on each training window.
    RelativeToMax(f64),
}

/// Lasso, `min (1/2n) sum (y - b - x.w)^2 + lambda |w|_1`, by cyclic
/// coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoSpec {
    pub penalty: LassoPenalty,
    pub include_intercept: bool,
    /// Stop once no coefficient moves by more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoSpec {
    fn default() -> Self {
        Self {
            penalty: LassoPenalty::RelativeToMax(0.1),
            include_intercept: true,
            tol: 1e-7,
            max_sweeps: 10_000,
        }
    }
}

#[inline]
fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// `max_j |(1/n) sum x_tj y_t|`, on centered data when an intercept is fit.
pub fn lasso_lambda_max(train: SeriesView<'_>, include_intercept: bool) -> f64 {
    let mo = moments(train, include_intercept);
    mo.xty.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn fit_lasso(train: SeriesView<'_>, spec: &LassoSpec) -> Result<LinearModel> {
    lasso_impl(train, spec, None)
}

/// Same as [`fit_lasso`], also returning the objective after every sweep.
pub fn fit_lasso_traced(train: SeriesView<'_>, spec: &LassoSpec) -> Result<(LinearModel, Vec<f64>)> {
    let mut trace = Vec::new();
    let model = lasso_impl(train, spec, Some(&mut trace))?;
    Ok((model, trace))
}

fn lasso_impl(train: SeriesView<'_>, spec: &LassoSpec, mut trace: Option<&mut Vec<f64>>) -> Result<LinearModel> {
    if train.is_empty() {
        return Err(Error::SeriesTooShort { n: 0, required: 1 });
    }
    let mo = moments(train, spec.include_intercept);
    let p = mo.p;
    let lambda_max = mo.xty.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let lambda = match spec.penalty {
        LassoPenalty::Fixed(l) => l,
        LassoPenalty::RelativeToMax(f) => f * lambda_max,
    };
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", "lasso penalty must be finite and >= 0"));
    }
    let g = &mo.gram;
    let mut w = vec![0.0; p];
    // grad[j] = c_j - sum_k G_jk w_k, kept up to date after every move.
    let mut grad = mo.xty.clone();
    let objective = |w: &[f64], grad: &[f64]| {
        // (1/2n)|y - Xw|^2 = yty/2 - c.w + w'Gw/2 and Gw = c - grad.
        let cw: f64 = mo.xty.iter().zip(w).map(|(c, v)| c * v).sum();
        let wgw: f64 = w
            .iter()
            .zip(mo.xty.iter().zip(grad))
            .map(|(v, (c, r))| v * (c - r))
            .sum();
        mo.yty / 2.0 - cw + wgw / 2.0 + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
    };
    if lambda >= lambda_max {
        if let Some(t) = trace.as_deref_mut() {
            t.push(objective(&w, &grad));
        }
        return Ok(mo.model(w));
    }
    let mut last_change = f64::INFINITY;
    for _ in 0..spec.max_sweeps {
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            let gjj = g[j * p + j];
            if gjj <= 0.0 {
                continue;
            }
            let old = w[j];
            let new = soft_threshold(grad[j] + gjj * old, lambda) / gjj;
            let d = new - old;
            if d != 0.0 {
                w[j] = new;
                let row = &g[j * p..(j + 1) * p];
                for (gk, gjk) in grad.iter_mut().zip(row) {
                    *gk -= gjk * d;
                }
                max_change = max_change.max(d.abs());
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(objective(&w, &grad));
        }
        last_change = max_change;
        if max_change <= spec.tol {
            return Ok(mo.model(w));
        }
    }
    Err(Error::NotConverged {
        what: "lasso coordinate descent",
        iterations: spec.max_sweeps,
        residual: last_change,
    })
}

/// GARCH(1,1) with Gaussian quasi-likelihood. The series outcomes are the
/// realized variances `V_t = R_t^2`; features are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchSpec {
    pub max_iter: usize,
}

impl Default for GarchSpec {
    fn default() -> Self {
        Self { max_iter: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Garch11Model {
    pub omega: f64,
    pub tau: f64,
    pub beta: f64,
    /// Fitted conditional variances over the training window.
    pub sigma2: Vec<f64>,
    /// Last realized variance of the training window.
    pub last_v: f64,
    pub neg_loglik: f64,
}

impl Garch11Model {
    /// One-step forecast followed by the multiperiod recursion.
    pub fn forecast(&self, horizon: usize) -> f64 {
        let s_last = *self.sigma2.last().unwrap_or(&0.0);
        let mut s = self.omega + self.tau * self.last_v + self.beta * s_last;
        for _ in 1..horizon {
            s = self.omega + (self.tau + self.beta) * s;
        }
        s
    }

    pub fn long_run_variance(&self) -> f64 {
        self.omega / (1.0 - self.tau - self.beta)
    }
}

impl Predict for Garch11Model {
    fn predict(&self, _x: &[f64], horizon: usize) -> f64 {
        self.forecast(horizon.max(1))
    }
}

/// Multiperiod variance forecast `r` steps ahead, `1 <= r <= n_te`.
pub fn garch_multiperiod_forecast(model: &Garch11Model, r: usize, n_te: usize) -> Result<f64> {
    if r == 0 || r > n_te {
        return Err(Error::param("horizon", "must lie in 1..=n_te"));
    }
    Ok(model.forecast(r))
}

/// Negative Gaussian quasi-log-likelihood (up to constants) and the fitted
/// variance path, with `sigma^2_1` set to the sample mean of `v`.
pub fn garch_neg_loglik(v: &[f64], omega: f64, tau: f64, beta: f64) -> (f64, Vec<f64>) {
    let n = v.len();
    let mut s2 = Vec::with_capacity(n);
    let mut s = v.iter().sum::<f64>() / n as f64;
    let mut nll = 0.0;
    for t in 0..n {
        if t > 0 {
            s = omega + tau * v[t - 1] + beta * s;
        }
        s2.push(s);
        nll += libm::log(s) + v[t] / s;
    }
    (nll, s2)
}

#[inline]
fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-u))
}

fn unpack(u: &[f64; 3]) -> (f64, f64, f64) {
    let omega = libm::exp(u[0]);
    let persist = logistic(u[1]);
    let share = logistic(u[2]);
    (omega, persist * share, persist * (1.0 - share))
}

/// Largest `tau + beta` the optimizer may visit.
const MAX_PERSISTENCE: f64 = 1.0 - 1e-9;

#[inline]
fn logit(p: f64) -> f64 {
    libm::log(p / (1.0 - p))
}

/// Fits GARCH(1,1) to realized variances `v` (squared returns) starting
/// from `init = (omega, tau, beta)`, or from `(0.05 var, 0.1, 0.8)`.
pub fn fit_garch11(v: &[f64], init: Option<(f64, f64, f64)>, spec: &GarchSpec) -> Result<Garch11Model> {
    if v.len() < 50 {
        return Err(Error::SeriesTooShort {
            n: v.len(),
            required: 50,
        });
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::NonFinite { index: i + 1 });
    }
    let var = v.iter().sum::<f64>() / v.len() as f64;
    if var <= 0.0 {
        return Err(Error::Degenerate("all returns are zero".into()));
    }
    let (w0, t0, b0) = init.unwrap_or((0.05 * var, 0.1, 0.8));
    if !(w0 > 0.0 && t0 > 0.0 && b0 > 0.0 && t0 + b0 < 1.0) {
        return Err(Error::param("init", "need omega > 0, tau, beta > 0 and tau + beta < 1"));
    }
    let start = [libm::log(w0), logit(t0 + b0), logit(t0 / (t0 + b0))];
    let f = |u: &[f64; 3]| {
        let (w, t, b) = unpack(u);
        // Persistence that rounds to 1 is outside the model.
        if !(w > 0.0) || t + b >= MAX_PERSISTENCE {
            return f64::INFINITY;
        }
        let (nll, _) = garch_neg_loglik(v, w, t, b);
        if nll.is_finite() {
            nll
        } else {
            f64::INFINITY
        }
    };
    let mut best = nelder_mead(&f, start, 0.5, spec.max_iter / 2);
    // A restart around the first optimum guards against early collapse.
    best = nelder_mead(&f, best, 0.1, spec.max_iter / 2);
    let (omega, tau, beta) = unpack(&best);
    if !(omega.is_finite() && omega > 0.0 && tau + beta < MAX_PERSISTENCE) {
        return Err(Error::GarchBoundary { omega, tau, beta });
    }
    let (neg_loglik, sigma2) = garch_neg_loglik(v, omega, tau, beta);
    Ok(Garch11Model {
        omega,
        tau,
        beta,
        sigma2,
        last_v: *v.last().unwrap(),
        neg_loglik,
    })
}

/// Plain Nelder-Mead minimization in three dimensions.
fn nelder_mead(f: &impl Fn(&[f64; 3]) -> f64, x0: [f64; 3], step: f64, max_iter: usize) -> [f64; 3] {
    let mut pts: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    pts.push((x0, f(&x0)));
    for i in 0..3 {
        let mut x = x0;
        x[i] += step;
        pts.push((x, f(&x)));
    }
    let comb = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };
    for _ in 0..max_iter {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = pts[3].1 - pts[0].1;
        let size = (1..4)
            .map(|i| (0..3).map(|k| (pts[i].0[k] - pts[0].0[k]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= 1e-12 * (1.0 + pts[0].1.abs()) && size < 1e-7 {
            break;
        }
        let mut c = [0.0; 3];
        for p in &pts[..3] {
            for k in 0..3 {
                c[k] += p.0[k] / 3.0;
            }
        }
        let worst = pts[3];
        let xr = comb(&c, &worst.0, -1.0);
        let fr = f(&xr);
        if fr < pts[0].1 {
            let xe = comb(&c, &worst.0, -2.0);
            let fe = f(&xe);
            pts[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[2].1 {
            pts[3] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = comb(&c, &xr, 0.5);
                (x, f(&x))
            } else {
                let x = comb(&c, &worst.0, 0.5);
                (x, f(&x))
            };
            if fc < worst.1.min(fr) {
                pts[3] = (xc, fc);
            } else {
                let b = pts[0].0;
                for p in pts.iter_mut().skip(1) {
                    p.0 = comb(&b, &p.0, 0.5);
                    p.1 = f(&p.0);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    pts[0].0
}

/// Training-window mean of the outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanForecaster;

/// Any of the built-in forecasters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecasterSpec {
    Ridge(RidgeSpec),
    Lasso(LassoSpec),
    Garch(GarchSpec),
    Mean,
}

impl Default for ForecasterSpec {
    fn default() -> Self {
        ForecasterSpec::Lasso(LassoSpec::default())
    }
}

impl ForecasterSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ForecasterSpec::Ridge(_) => "ridge",
            ForecasterSpec::Lasso(_) => "lasso",
            ForecasterSpec::Garch(_) => "garch",
            ForecasterSpec::Mean => "mean",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Linear(LinearModel),
    Garch(Garch11Model),
    Constant(f64),
}

impl Predict for FittedModel {
    fn predict(&self, x: &[f64], horizon: usize) -> f64 {
        match self {
            FittedModel::Linear(m) => m.predict(x, horizon),
            FittedModel::Garch(m) => m.predict(x, horizon),
            FittedModel::Constant(c) => *c,
        }
    }
}

impl Forecaster for MeanForecaster {
    type Model = f64;

    fn fit(&self, train: SeriesView<'_>) -> Result<f64> {
        if train.is_empty() {
            return Err(Error::SeriesTooShort { n: 0, required: 1 });
        }
        Ok(train.outcomes().iter().sum::<f64>() / train.len() as f64)
    }
}

impl Predict for f64 {
    fn predict(&self, _x: &[f64], _horizon: usize) -> f64 {
        *self
    }
}

impl Forecaster for ForecasterSpec {
    type Model = FittedModel;

    fn fit(&self, train: SeriesView<'_>) -> Result<FittedModel> {
        match self {
            ForecasterSpec::Ridge(s) => fit_ridge(train, s).map(FittedModel::Linear),
            ForecasterSpec::Lasso(s) => fit_lasso(train, s).map(FittedModel::Linear),
            ForecasterSpec::Garch(s) => fit_garch11(train.outcomes(), None, s).map(FittedModel::Garch),
            ForecasterSpec::Mean => MeanForecaster.fit(train).map(FittedModel::Constant),
        }
    }
}

impl<F: Forecaster> Forecaster for &F {
    type Model = F::Model;

    fn fit(&self, train: SeriesView<'_>) -> Result<F::Model> {
        (**self).fit(train)
    }
}
