//! Adaptive conformal inference with delayed feedback (ACI-DF) and the
//! adaptive QFCV constructor.
//!
//! Time runs `t = 1, 2, ..., T`. After `z_t` is observed:
//!
//! 1. the interval issued for time `s = t - n_te + 1` can be scored, since
//!    its error `Err_sto^s` only involves `z_s, ..., z_t`;
//! 2. if `t` is a multiple of `delta` and `t > k delta`, with `k` the
//!    smallest integer such that `k delta >= n_te`, the state moves as
//!    `theta <- theta + gamma (1 - alpha - c_{t - k delta + 1})`;
//! 3. if `t` is a multiple of `delta` (and past the warm-up start), a new
//!    interval is issued for time `t + 1` from `z_{1..t}` and `theta`.
//!
//! Intervals therefore live at times `j delta + 1`, exactly the times whose
//! coverage indicators the update rule consumes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forecast::Forecaster;
use crate::interval::{IntervalRecord, MethodTag};
use crate::layout::{FoldLayout, WindowSizes};
use crate::qfcv::{fold_losses, qfcv_from_losses, realized_test_error, star_val_losses, FoldLosses, QfcvConfig};
use crate::series::SeriesView;

/// `min { s >= 1 : s delta >= n_te }`.
pub fn delay_multiple(delta: usize, n_te: usize) -> usize {
    n_te.div_ceil(delta).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AciParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: usize,
    pub n_te: usize,
    /// The first interval is built from `z_{1..start}`.
    pub start: usize,
    /// Run length `T`.
    pub horizon: usize,
}

impl AciParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", "must lie strictly inside (0, 1)"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", "step size must be > 0"));
        }
        if self.delta == 0 || self.n_te == 0 {
            return Err(Error::param("delta", "delta and n_te must be at least 1"));
        }
        let k = delay_multiple(self.delta, self.n_te);
        if self.horizon < (k + 1) * self.delta {
            return Err(Error::SeriesTooShort {
                n: self.horizon,
                required: (k + 1) * self.delta,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AciState {
    pub theta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub delta: usize,
    pub n_te: usize,
    pub k: usize,
    last_t: usize,
    /// Coverage indicators that are known but not yet consumed, by time.
    pending: BTreeMap<usize, bool>,
}

/// What a call to [`aci_step`] did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub updated: bool,
    /// Time and indicator of the interval whose coverage fed the update.
    pub consumed: Option<(usize, bool)>,
    /// `theta_{t+1}`.
    pub theta: f64,
}

impl AciState {
    pub fn new(alpha: f64, gamma: f64, delta: usize, n_te: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", "must lie strictly inside (0, 1)"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", "step size must be > 0"));
        }
        if delta == 0 || n_te == 0 {
            return Err(Error::param("delta", "delta and n_te must be at least 1"));
        }
        Ok(Self {
            theta: 0.0,
            gamma,
            alpha,
            delta,
            n_te,
            k: delay_multiple(delta, n_te),
            last_t: 0,
            pending: BTreeMap::new(),
        })
    }

    pub fn last_time(&self) -> usize {
        self.last_t
    }

    /// Whether an interval is issued after observing `z_t`.
    pub fn issues_at(&self, t: usize) -> bool {
        t.is_multiple_of(self.delta)
    }
}

/// Advances the state past time `t`. `resolved` carries the coverage
/// indicator of the interval at time `t - n_te + 1`, if one was issued.
pub fn aci_step(state: &mut AciState, t: usize, resolved: Option<(usize, bool)>) -> Result<StepOutcome> {
    if t != state.last_t + 1 {
        return Err(Error::OutOfOrder {
            expected: state.last_t + 1,
            got: t,
        });
    }
    if let Some((s, c)) = resolved {
        if s + state.n_te != t + 1 {
            return Err(Error::OutOfOrder {
                expected: (t + 1).saturating_sub(state.n_te),
                got: s,
            });
        }
        state.pending.insert(s, c);
    }
    state.last_t = t;
    let mut out = StepOutcome {
        updated: false,
        consumed: None,
        theta: state.theta,
    };
    if t.is_multiple_of(state.delta) && t > state.k * state.delta {
        let s = t - state.k * state.delta + 1;
        debug_assert!(s + state.n_te <= t + 1);
        if let Some(c) = state.pending.remove(&s) {
            let cf = if c { 1.0 } else { 0.0 };
            state.theta += state.gamma * (1.0 - state.alpha - cf);
            out.updated = true;
            out.consumed = Some((s, c));
        }
        // Anything older can never be consumed.
        state.pending.retain(|&u, _| u > s);
    }
    out.theta = state.theta;
    Ok(out)
}

/// Builds the interval for the next time from the observed prefix and
/// `theta`.
pub trait PiConstructor {
    fn build(&mut self, history: SeriesView<'_>, theta: f64) -> Result<IntervalRecord>;

    /// Saturation bounds `(m, M)`: the interval is the whole line for
    /// `theta > M` and empty for `theta < m`.
    fn bounds(&self) -> Option<(f64, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingRecord {
    /// Time `s` of the interval; it targets `Err_sto^s` over `s..s+n_te-1`.
    pub t: usize,
    pub interval: IntervalRecord,
    pub err_sto: f64,
    pub covered: bool,
    /// `theta_s` used to build the interval.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingRun {
    pub records: Vec<RollingRecord>,
    /// `theta_{t+1}` after each step `t = 1..=T`.
    pub theta_path: Vec<f64>,
    pub params: AciParams,
    pub bounds: Option<(f64, f64)>,
    /// Number of updates of `theta`.
    pub updates: usize,
}

impl RollingRun {
    pub fn coverage(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.covered).collect()
    }

    pub fn time_avg_coverage(&self) -> f64 {
        time_avg_coverage(&self.coverage())
    }

    /// `|(1/T) sum (1 - alpha - c_s)|` over all issued intervals.
    pub fn coverage_regret(&self) -> f64 {
        let t = self.records.len() as f64;
        let s: f64 = self
            .records
            .iter()
            .map(|r| 1.0 - self.params.alpha - if r.covered { 1.0 } else { 0.0 })
            .sum();
        (s / t).abs()
    }

    /// `(M - m + 3 n_te gamma) / (T gamma)` when the constructor saturates.
    pub fn regret_bound(&self) -> Option<f64> {
        let (m, big_m) = self.bounds?;
        let p = &self.params;
        Some((big_m - m + 3.0 * p.n_te as f64 * p.gamma) / (self.records.len() as f64 * p.gamma))
    }

    /// Checks `m - n_te gamma <= theta_t <= M + n_te gamma` along the path.
    pub fn theta_within_bounds(&self) -> Option<bool> {
        let (m, big_m) = self.bounds?;
        let slack = self.params.n_te as f64 * self.params.gamma;
        Some(
            self.theta_path
                .iter()
                .all(|&th| th >= m - slack && th <= big_m + slack),
        )
    }
}

pub fn time_avg_coverage(covered: &[bool]) -> f64 {
    if covered.is_empty() {
        return f64::NAN;
    }
    covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64
}

/// Fraction of `runs` covering at interval time `t`; `None` if no run has
/// an interval there.
pub fn instance_avg_coverage(runs: &[RollingRun], t: usize) -> Option<f64> {
    let hits: Vec<bool> = runs
        .iter()
        .filter_map(|r| r.records.iter().find(|rec| rec.t == t).map(|rec| rec.covered))
        .collect();
    if hits.is_empty() {
        None
    } else {
        Some(time_avg_coverage(&hits))
    }
}

/// Runs ACI-DF over `series = z_{1..T}`. `realized(s)` must return
/// `Err_sto^s`; it is only called once `z_{s+n_te-1}` has been observed.
pub fn run_acidf<C: PiConstructor + ?Sized>(
    series: SeriesView<'_>,
    constructor: &mut C,
    realized: &mut dyn FnMut(usize) -> Result<f64>,
    params: &AciParams,
) -> Result<RollingRun> {
    params.validate()?;
    if series.len() < params.horizon {
        return Err(Error::SeriesTooShort {
            n: series.len(),
            required: params.horizon,
        });
    }
    let mut state = AciState::new(params.alpha, params.gamma, params.delta, params.n_te)?;
    let mut records: Vec<RollingRecord> = Vec::new();
    let mut by_time: BTreeMap<usize, usize> = BTreeMap::new();
    let mut theta_path = Vec::with_capacity(params.horizon);
    let mut updates = 0;
    for t in 1..=params.horizon {
        let mut resolved = None;
        if t >= params.n_te {
            let s = t + 1 - params.n_te;
            if let Some(&idx) = by_time.get(&s) {
                let err = realized(s).map_err(|e| Error::Constructor {
                    t: s,
                    source: alloc::boxed::Box::new(e),
                })?;
                let rec = &mut records[idx];
                rec.err_sto = err;
                rec.covered = rec.interval.contains(err);
                resolved = Some((s, rec.covered));
            }
        }
        let out = aci_step(&mut state, t, resolved)?;
        if out.updated {
            updates += 1;
        }
        theta_path.push(state.theta);
        if state.issues_at(t) && t >= params.start && t + params.n_te <= params.horizon {
            let history = series.prefix(t)?;
            let interval = constructor.build(history, state.theta).map_err(|e| Error::Constructor {
                t: t + 1,
                source: alloc::boxed::Box::new(e),
            })?;
            by_time.insert(t + 1, records.len());
            records.push(RollingRecord {
                t: t + 1,
                interval,
                err_sto: f64::NAN,
                covered: false,
                theta: state.theta,
            });
        }
    }
    Ok(RollingRun {
        records,
        theta_path,
        params: *params,
        bounds: constructor.bounds(),
        updates,
    })
}

/// `Err_sto^s` of a forecaster trained on the window ending at `s - 1`.
pub fn rolling_realized_error<F: Forecaster>(
    series: SeriesView<'_>,
    forecaster: &F,
    sizes: &WindowSizes,
    loss: &crate::loss::LossFn,
    s: usize,
) -> Result<f64> {
    let n = s - 1;
    if n < sizes.n_tr {
        return Err(Error::SeriesTooShort { n, required: sizes.n_tr });
    }
    let layout = FoldLayout {
        n,
        sizes: *sizes,
        k: sizes.fold_count(n),
    };
    realized_test_error(series, &layout, forecaster, loss)
}

/// Fold losses that stay valid as the series grows: fold `i` only ever
/// touches indices up to `(i-1) delta + n_tr + n_val + n_te`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FoldCache {
    folds: Vec<FoldLosses>,
    star: BTreeMap<usize, Vec<f64>>,
}

impl FoldCache {
    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }
}

/// QFCV as an ACI-DF constructor. With `adaptive`, `theta` shifts the
/// nominal miscoverage to `alpha - theta`: `alpha - theta <= 0` gives the
/// whole line and `alpha - theta >= 1` the empty set, so the saturation
/// bounds are `m = alpha - 1`, `M = alpha`. Without it the plain QFCV
/// interval at level `alpha` is returned regardless of `theta`.
#[derive(Debug, Clone)]
pub struct AqfcvConstructor<F> {
    pub forecaster: F,
    pub config: QfcvConfig,
    pub adaptive: bool,
    cache: FoldCache,
    /// Intervals returned as the whole line for lack of history.
    pub warmups: usize,
}

impl<F: Forecaster> AqfcvConstructor<F> {
    pub fn new(forecaster: F, config: QfcvConfig, adaptive: bool) -> Self {
        Self {
            forecaster,
            config,
            adaptive,
            cache: FoldCache::default(),
            warmups: 0,
        }
    }

    /// Reuses losses computed by another constructor on the same series.
    pub fn with_cache(mut self, cache: FoldCache) -> Self {
        self.cache = cache;
        self
    }

    pub fn into_cache(self) -> FoldCache {
        self.cache
    }

    fn method(&self) -> MethodTag {
        if self.adaptive {
            MethodTag::Aqfcv
        } else {
            MethodTag::Qfcv { m: self.config.aux.m }
        }
    }
}

impl<F: Forecaster> PiConstructor for AqfcvConstructor<F> {
    fn build(&mut self, history: SeriesView<'_>, theta: f64) -> Result<IntervalRecord> {
        let alpha = self.config.alpha;
        let n = history.len();
        let level = if self.adaptive { alpha - theta } else { alpha };
        // Rounding in theta can leave a level so small that the upper
        // quantile level rounds to 1; that is the full line too.
        if level <= 0.0 || 1.0 - level / 2.0 >= 1.0 {
            return Ok(IntervalRecord::full(self.method(), alpha, n + 1));
        }
        if level >= 1.0 {
            return Ok(IntervalRecord::empty(self.method(), alpha, n + 1));
        }
        let sizes = self.config.sizes;
        let k = sizes.fold_count(n);
        if k < self.config.min_folds() {
            self.warmups += 1;
            return Ok(IntervalRecord::full(self.method(), alpha, n + 1));
        }
        let layout = sizes.layout(n)?;
        for i in self.cache.folds.len() + 1..=k {
            let f = fold_losses(history, &layout, i, &self.forecaster, &self.config.loss)?;
            self.cache.folds.push(f);
        }
        if !self.cache.star.contains_key(&n) {
            let s = star_val_losses(history, &layout, &self.forecaster, &self.config.loss)?;
            self.cache.star.insert(n, s);
        }
        let cfg = QfcvConfig { alpha: level, ..self.config };
        let out = qfcv_from_losses(&self.cache.folds[..k], &self.cache.star[&n], &cfg, n)?;
        let mut rec = out.interval;
        rec.method = self.method();
        rec.alpha = alpha;
        Ok(rec)
    }

    fn bounds(&self) -> Option<(f64, f64)> {
        if self.adaptive {
            Some((self.config.alpha - 1.0, self.config.alpha))
        } else {
            None
        }
    }
}
