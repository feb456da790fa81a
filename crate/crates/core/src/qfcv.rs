//! Quantile-based forward cross-validation.
//!
//! For each fold `i` a model fit on `D_i` is scored on `V_i` (the
//! auxiliary features `Err_i^val`) and a model fit on `D_i*` is scored on
//! `T_i` (the target `Err_i^test`). Quantile regressions of the targets on
//! the features at levels `alpha/2` and `1 - alpha/2`, evaluated at the
//! features of the newest window, give the prediction interval for the
//! unseen `Err_sto`.
//!
//! Per-fold losses are stored raw ([`FoldLosses`]) so that any number of
//! auxiliary dimensions `m`, and the FCV estimators, can be derived from a
//! single pass of model fits.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forecast::{Forecaster, Predict};
use crate::interval::{IntervalRecord, MethodTag};
use crate::layout::{FoldLayout, IndexRange, WindowSizes};
use crate::linalg::{independent_columns, least_squares};
use crate::loss::LossFn;
use crate::quantreg::{fit_linear_quantile, LinearQuantileModel};
use crate::series::SeriesView;

/// Number of auxiliary features; `m = 0` is the constant feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxSpec {
    pub m: usize,
}

impl Default for AuxSpec {
    fn default() -> Self {
        Self { m: 1 }
    }
}

/// One regression sample `(Err_i^val, Err_i^test)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrPair {
    pub err_val: Vec<f64>,
    pub err_test: f64,
}

/// Raw per-index validation losses and the mean test loss of one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldLosses {
    pub val: Vec<f64>,
    pub test: f64,
}

impl FoldLosses {
    /// Mean validation loss, the FCV fold error `E_i`.
    pub fn val_mean(&self) -> f64 {
        self.val.iter().sum::<f64>() / self.val.len() as f64
    }
}

/// Losses of `model` (trained on a window ending at `train_end`) on every
/// index of `window`; the horizon of index `t` is `t - train_end`.
pub fn window_losses<M: Predict>(
    series: SeriesView<'_>,
    model: &M,
    window: IndexRange,
    train_end: usize,
    loss: &LossFn,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(window.len());
    for t in window.iter() {
        if !series.contains(t) {
            return Err(Error::MissingIndex {
                index: t,
                len: series.last_index(),
            });
        }
        let y_hat = model.predict(series.x_at(t), t - train_end);
        out.push(loss.eval(y_hat, series.y_at(t)));
    }
    Ok(out)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `Err_sto`: mean loss on the star test window `T` of a model fit on `D*`.
/// `series` must extend through `n + n_te`.
pub fn stochastic_test_error<M: Predict>(
    series: SeriesView<'_>,
    model: &M,
    layout: &FoldLayout,
    loss: &LossFn,
) -> Result<f64> {
    let train_end = layout.star_train_full().end;
    window_losses(series, model, layout.star_test(), train_end, loss).map(|v| mean(&v))
}

/// Fits `forecaster` on `D*` and returns the realized `Err_sto`.
pub fn realized_test_error<F: Forecaster>(
    series: SeriesView<'_>,
    layout: &FoldLayout,
    forecaster: &F,
    loss: &LossFn,
) -> Result<f64> {
    let model = forecaster.fit(series.window(layout.star_train_full())?)?;
    stochastic_test_error(series, &model, layout, loss)
}

/// Validation and test losses of fold `i` (1-based).
pub fn fold_losses<F: Forecaster>(
    series: SeriesView<'_>,
    layout: &FoldLayout,
    i: usize,
    forecaster: &F,
    loss: &LossFn,
) -> Result<FoldLosses> {
    let run = || -> Result<FoldLosses> {
        let d = layout.train(i);
        let model = forecaster.fit(series.window(d)?)?;
        let val = window_losses(series, &model, layout.val(i), d.end, loss)?;
        let ds = layout.train_star(i);
        let model = forecaster.fit(series.window(ds)?)?;
        let test = mean(&window_losses(series, &model, layout.test(i), ds.end, loss)?);
        Ok(FoldLosses { val, test })
    };
    run().map_err(|e| e.in_fold(i))
}

/// Per-index losses on the newest validation window `V` of a model fit on `D`.
pub fn star_val_losses<F: Forecaster>(
    series: SeriesView<'_>,
    layout: &FoldLayout,
    forecaster: &F,
    loss: &LossFn,
) -> Result<Vec<f64>> {
    let d = layout.star_train();
    let model = forecaster.fit(series.window(d)?)?;
    window_losses(series, &model, layout.star_val(), d.end, loss)
}

/// Means over `m` contiguous blocks of `losses`, earlier blocks taking one
/// extra element when the length does not divide evenly. `m = 0` yields
/// the constant feature `[1]`.
pub fn block_means(losses: &[f64], m: usize) -> Result<Vec<f64>> {
    let n = losses.len();
    if m > n {
        return Err(Error::param("m", "auxiliary dimension exceeds n_val"));
    }
    if m == 0 {
        return Ok(vec![1.0]);
    }
    let (base, extra) = (n / m, n % m);
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for b in 0..m {
        let len = base + usize::from(b < extra);
        out.push(mean(&losses[start..start + len]));
        start += len;
    }
    Ok(out)
}

/// Sizes of the blocks used by [`block_means`].
pub fn block_sizes(n: usize, m: usize) -> Vec<usize> {
    if m == 0 || m > n {
        return Vec::new();
    }
    (0..m).map(|b| n / m + usize::from(b < n % m)).collect()
}

/// `A_m(z_D, z_V)`: fit on `train`, score on `val`, average per block.
pub fn aux_features<F: Forecaster>(
    train: SeriesView<'_>,
    val: SeriesView<'_>,
    forecaster: &F,
    loss: &LossFn,
    m: usize,
) -> Result<Vec<f64>> {
    if m > val.len() {
        return Err(Error::param("m", "auxiliary dimension exceeds n_val"));
    }
    let model = forecaster.fit(train)?;
    let losses = window_losses(
        val,
        &model,
        IndexRange::new(val.first_index(), val.last_index()),
        train.last_index(),
        loss,
    )?;
    block_means(&losses, m)
}

pub fn pairs_from_losses(folds: &[FoldLosses], m: usize) -> Result<Vec<ErrPair>> {
    folds
        .iter()
        .map(|f| {
            Ok(ErrPair {
                err_val: block_means(&f.val, m)?,
                err_test: f.test,
            })
        })
        .collect()
}

/// All fold losses plus the star validation losses.
pub fn compute_fold_losses<F: Forecaster>(
    series: SeriesView<'_>,
    layout: &FoldLayout,
    forecaster: &F,
    loss: &LossFn,
) -> Result<(Vec<FoldLosses>, Vec<f64>)> {
    if series.len() < layout.n {
        return Err(Error::SeriesTooShort {
            n: series.len(),
            required: layout.n,
        });
    }
    let folds = (1..=layout.k)
        .map(|i| fold_losses(series, layout, i, forecaster, loss))
        .collect::<Result<Vec<_>>>()?;
    let star = star_val_losses(series, layout, forecaster, loss)?;
    Ok((folds, star))
}

/// The `K` tuples `(Err_i^val, Err_i^test)` and `Err_*^val`.
pub fn compute_err_pairs<F: Forecaster>(
    series: SeriesView<'_>,
    layout: &FoldLayout,
    forecaster: &F,
    loss: &LossFn,
    aux: AuxSpec,
) -> Result<(Vec<ErrPair>, Vec<f64>)> {
    if aux.m > layout.sizes.n_val {
        return Err(Error::param("m", "auxiliary dimension exceeds n_val"));
    }
    let (folds, star) = compute_fold_losses(series, layout, forecaster, loss)?;
    Ok((pairs_from_losses(&folds, aux.m)?, block_means(&star, aux.m)?))
}

/// Regression design for memory span `span`: row `i` stacks the features of
/// folds `i, i-1, ..., i-span+1`; the star row stacks `Err_*^val` and the
/// last `span - 1` fold features.
fn stacked_design(pairs: &[ErrPair], star_val: &[f64], span: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, usize)> {
    if span == 0 {
        return Err(Error::param("memory_span", "must be at least 1"));
    }
    let d = star_val.len();
    if let Some(i) = pairs.iter().position(|p| p.err_val.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: pairs[i].err_val.len(),
        }
        .in_fold(i + 1));
    }
    let k = pairs.len();
    let width = d * span;
    if k < span || k - span + 1 < width + 2 {
        return Err(Error::InsufficientFolds {
            k,
            required: width + span + 1,
        });
    }
    let mut x = Vec::with_capacity((k - span + 1) * width);
    let mut y = Vec::with_capacity(k - span + 1);
    for i in span - 1..k {
        for lag in 0..span {
            x.extend_from_slice(&pairs[i - lag].err_val);
        }
        y.push(pairs[i].err_test);
    }
    let mut star = star_val.to_vec();
    for lag in 0..span - 1 {
        star.extend_from_slice(&pairs[k - 1 - lag].err_val);
    }
    Ok((x, y, star, width))
}

/// Both quantile fits and their evaluation at the star features.
#[derive(Debug, Clone, PartialEq)]
pub struct QfcvFit {
    pub lo: f64,
    pub hi: f64,
    pub lo_model: LinearQuantileModel,
    pub hi_model: LinearQuantileModel,
    /// The fitted lower quantile exceeded the upper one and the endpoints
    /// were swapped.
    pub crossed: bool,
}

/// Quantile regressions at `alpha/2` and `1 - alpha/2`, evaluated at the
/// star features; crossed endpoints are swapped.
pub fn qfcv_interval(pairs: &[ErrPair], star_val: &[f64], alpha: f64, memory_span: usize) -> Result<QfcvFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "must lie strictly inside (0, 1)"));
    }
    let (x, y, star, width) = stacked_design(pairs, star_val, memory_span)?;
    let lo_model = fit_linear_quantile(&x, width, &y, alpha / 2.0)?;
    let hi_model = fit_linear_quantile(&x, width, &y, 1.0 - alpha / 2.0)?;
    let (a, b) = (lo_model.predict(&star), hi_model.predict(&star));
    let crossed = a > b;
    let (lo, hi) = if crossed { (b, a) } else { (a, b) };
    Ok(QfcvFit {
        lo,
        hi,
        lo_model,
        hi_model,
        crossed,
    })
}

/// Least-squares regression of `Err^test` on `Err^val` (with intercept),
/// evaluated at the star features.
pub fn qfcv_point(pairs: &[ErrPair], star_val: &[f64], memory_span: usize) -> Result<f64> {
    let (x, y, star, width) = stacked_design(pairs, star_val, memory_span)?;
    let rows = y.len();
    let p = width + 1;
    let mut design = Vec::with_capacity(rows * p);
    for i in 0..rows {
        design.push(1.0);
        design.extend_from_slice(&x[i * width..(i + 1) * width]);
    }
    // Drop features that are constant or collinear, e.g. the m = 0 column.
    let keep = independent_columns(&design, rows, p, 1e-10);
    let q = keep.len();
    let mut reduced = Vec::with_capacity(rows * q);
    for i in 0..rows {
        for &j in &keep {
            reduced.push(design[i * p + j]);
        }
    }
    let coef = least_squares(&reduced, &y, rows, q)?;
    Ok(keep
        .iter()
        .zip(&coef)
        .map(|(&j, c)| if j == 0 { *c } else { c * star[j - 1] })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfcvConfig {
    pub alpha: f64,
    pub aux: AuxSpec,
    pub memory_span: usize,
    pub sizes: WindowSizes,
    pub loss: LossFn,
}

impl QfcvConfig {
    pub fn new(sizes: WindowSizes) -> Self {
        Self {
            alpha: 0.1,
            aux: AuxSpec::default(),
            memory_span: 1,
            sizes,
            loss: LossFn::Squared,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", "must lie strictly inside (0, 1)"));
        }
        if self.memory_span == 0 {
            return Err(Error::param("memory_span", "must be at least 1"));
        }
        if self.aux.m > self.sizes.n_val {
            return Err(Error::param("m", "auxiliary dimension exceeds n_val"));
        }
        self.sizes.validate()
    }

    /// Fewest folds for which the quantile regression is defined.
    pub fn min_folds(&self) -> usize {
        self.aux.m.max(1) * self.memory_span + self.memory_span + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfcvOutput {
    pub interval: IntervalRecord,
    pub point: f64,
    pub lo_model: LinearQuantileModel,
    pub hi_model: LinearQuantileModel,
    pub pairs: Vec<ErrPair>,
    pub star_val: Vec<f64>,
    pub crossed: bool,
}

/// Turns a fit into an interval record, clamping at zero for nonnegative
/// losses.
pub fn finish_interval(fit: &QfcvFit, loss: &LossFn, method: MethodTag, alpha: f64, t: usize) -> IntervalRecord {
    let (mut lo, mut hi) = (fit.lo, fit.hi);
    if loss.is_nonnegative() {
        lo = lo.max(0.0);
        hi = hi.max(0.0);
    }
    IntervalRecord::new(lo, hi, method, alpha, t)
}

/// QFCV on the observed series `z_{1..n}` (`n = series.len()`), from fold
/// losses that were already computed.
pub fn qfcv_from_losses(
    folds: &[FoldLosses],
    star_losses: &[f64],
    config: &QfcvConfig,
    n: usize,
) -> Result<QfcvOutput> {
    config.validate()?;
    let pairs = pairs_from_losses(folds, config.aux.m)?;
    let star_val = block_means(star_losses, config.aux.m)?;
    let fit = qfcv_interval(&pairs, &star_val, config.alpha, config.memory_span)?;
    let point = qfcv_point(&pairs, &star_val, config.memory_span)?;
    let interval = finish_interval(&fit, &config.loss, MethodTag::Qfcv { m: config.aux.m }, config.alpha, n + 1);
    Ok(QfcvOutput {
        interval,
        point,
        lo_model: fit.lo_model,
        hi_model: fit.hi_model,
        pairs,
        star_val,
        crossed: fit.crossed,
    })
}

/// Full QFCV on `series` (all of it is treated as observed).
pub fn run_qfcv<F: Forecaster>(series: SeriesView<'_>, forecaster: &F, config: &QfcvConfig) -> Result<QfcvOutput> {
    config.validate()?;
    let layout = config.sizes.layout(series.len())?;
    let (folds, star) = compute_fold_losses(series, &layout, forecaster, &config.loss)?;
    qfcv_from_losses(&folds, &star, config, layout.n)
}
