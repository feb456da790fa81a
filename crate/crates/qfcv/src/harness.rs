//! Replicated experiments: Monte-Carlo oracles, per-method coverage and
//! length metrics, and rolling (ACI-DF) runs over many instances.
//!
//! Replication `r` of an experiment simulates stream `r` of the data spec;
//! oracle draw `d` uses stream `ORACLE_STREAM + d`. Results are collected
//! in stream order, so the worker count never changes a table.

use std::collections::BTreeMap;

use rayon::prelude::*;

use qfcv_core::aci::{rolling_realized_error, run_acidf, AciParams, AqfcvConstructor, RollingRun};
use qfcv_core::fcv::{fcv_interval, fcv_point, FcvConfig, FcvVariant, FoldErrors};
use qfcv_core::forecast::ForecasterSpec;
use qfcv_core::layout::WindowSizes;
use qfcv_core::qfcv::{
    block_means, compute_fold_losses, finish_interval, pairs_from_losses, qfcv_interval, qfcv_point, realized_test_error,
    FoldLosses, QfcvConfig,
};
use qfcv_core::quantreg::empirical_quantile;
use qfcv_core::sim::{gen_garch11, simulate_linear, NoiseSpec, RngStream, SimSpec, DEFAULT_BURN_IN};
use qfcv_core::{Error, IntervalRecord, LossFn, MethodTag, Result, TimeSeries};

/// First stream used by oracle draws.
pub const ORACLE_STREAM: u64 = 1 << 40;

/// Returns `R_t` from a GARCH(1,1) process; the series stores the
/// realized variance `V_t = R_t^2` as outcome, with no features.
#[derive(Debug, Clone, PartialEq)]
pub struct GarchSim {
    pub n: usize,
    pub omega: f64,
    pub tau: f64,
    pub beta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Linear(SimSpec),
    Garch(GarchSim),
}

impl DataSpec {
    pub fn n(&self) -> usize {
        match self {
            DataSpec::Linear(s) => s.n,
            DataSpec::Garch(g) => g.n,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            DataSpec::Linear(s) => s.seed,
            DataSpec::Garch(g) => g.seed,
        }
    }

    /// Instance `stream` with `len` points.
    pub fn simulate(&self, len: usize, stream: u64) -> Result<TimeSeries> {
        match self {
            DataSpec::Linear(s) => {
                let spec = SimSpec { n: len, ..s.clone() };
                simulate_linear(&spec, stream)
            }
            DataSpec::Garch(g) => {
                let mut rng = RngStream::new(g.seed, stream);
                let r = gen_garch11(g.omega, g.tau, g.beta, len, DEFAULT_BURN_IN, &mut rng)?;
                let v: Vec<f64> = r.iter().map(|x| x * x).collect();
                TimeSeries::from_outcomes(&v)
            }
        }
    }

    /// The same spec with the AR coefficient of the noise set to `phi`.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        match self {
            DataSpec::Linear(s) => {
                let mut s = s.clone();
                match &mut s.noise {
                    NoiseSpec::Arma(a) => a.phi = vec![phi],
                    NoiseSpec::Nonstationary(ns) => ns.arima_phi = phi,
                }
                Ok(DataSpec::Linear(s))
            }
            DataSpec::Garch(_) => Err(Error::InvalidParameter {
                name: "sweep_phi",
                reason: "a phi sweep needs a linear simulation".into(),
            }),
        }
    }
}

/// An interval method evaluated by [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Qfcv { m: usize, memory_span: usize },
    Fcv { variant: FcvVariant, k_trun: Option<usize> },
    /// The Monte-Carlo band `[q05, q95]` of `Err_sto`.
    Oracle,
}

impl Method {
    pub const fn qfcv(m: usize) -> Self {
        Method::Qfcv { m, memory_span: 1 }
    }

    pub const fn fcv(variant: FcvVariant) -> Self {
        Method::Fcv { variant, k_trun: None }
    }

    pub fn label(&self) -> String {
        match self {
            Method::Qfcv { m, memory_span: 1 } => format!("QFCV({m})"),
            Method::Qfcv { m, memory_span } => format!("QFCV({m},L={memory_span})"),
            Method::Fcv { variant, .. } => variant.tag().to_string(),
            Method::Oracle => MethodTag::Oracle.to_string(),
        }
    }

    /// Config name: `qfcv<m>`, `fcv`, `fcv_c`, `fcv_p` or `oracle`.
    pub fn key(&self) -> String {
        match self {
            Method::Qfcv { m, .. } => format!("qfcv{m}"),
            Method::Fcv { variant: FcvVariant::Naive, .. } => "fcv".into(),
            Method::Fcv { variant: FcvVariant::Autocov, .. } => "fcv_c".into(),
            Method::Fcv { variant: FcvVariant::Scaling, .. } => "fcv_p".into(),
            Method::Oracle => "oracle".into(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fcv" => Some(Method::fcv(FcvVariant::Naive)),
            "fcv_c" => Some(Method::fcv(FcvVariant::Autocov)),
            "fcv_p" => Some(Method::fcv(FcvVariant::Scaling)),
            "oracle" => Some(Method::Oracle),
            _ => s.strip_prefix("qfcv")?.parse().ok().map(Method::qfcv),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub data: DataSpec,
    pub forecaster: ForecasterSpec,
    pub sizes: WindowSizes,
    pub loss: LossFn,
    pub alpha: f64,
    pub methods: Vec<Method>,
    pub replications: usize,
    pub oracle_draws: usize,
    /// Values of the noise AR coefficient to sweep over; empty for none.
    pub sweep_phi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleQuantiles {
    pub q05: f64,
    pub q95: f64,
    /// Monte-Carlo estimate of `Err`.
    pub mc_err: f64,
    pub mc_err_se: f64,
    pub draws: usize,
    pub failures: usize,
}

impl OracleQuantiles {
    pub fn width(&self) -> f64 {
        self.q95 - self.q05
    }
}

/// `Err_sto` of `draws` independent instances of `data` (observed length
/// `data.n()`), summarized by its 5% / 95% quantiles and mean.
pub fn oracle_quantiles(
    data: &DataSpec,
    forecaster: &ForecasterSpec,
    sizes: &WindowSizes,
    loss: &LossFn,
    draws: usize,
) -> Result<OracleQuantiles> {
    if draws < 100 {
        return Err(Error::InvalidParameter {
            name: "oracle_draws",
            reason: "at least 100 draws are needed".into(),
        });
    }
    let n = data.n();
    let layout = sizes.layout(n)?;
    let errs: Vec<Result<f64>> = (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            let s = data.simulate(n + sizes.n_te, ORACLE_STREAM + d)?;
            realized_test_error(s.view(), &layout, forecaster, loss)
        })
        .collect();
    let ok: Vec<f64> = errs.iter().filter_map(|e| e.as_ref().ok().copied()).collect();
    let failures = draws - ok.len();
    if ok.len() < 100 {
        return Err(errs.into_iter().find_map(|e| e.err()).unwrap_or(Error::Singular));
    }
    let (mean, se) = mean_se(&ok);
    Ok(OracleQuantiles {
        q05: empirical_quantile(&ok, 0.05)?,
        q95: empirical_quantile(&ok, 0.95)?,
        mc_err: mean,
        mc_err_se: se,
        draws: ok.len(),
        failures,
    })
}

/// Mean and standard error of the mean.
pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, f64::NAN);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Mean squared difference of `estimates` and `realized`.
pub fn mse_point(estimates: &[f64], realized: &[f64]) -> Result<f64> {
    if estimates.len() != realized.len() {
        return Err(Error::LengthMismatch {
            left: estimates.len(),
            right: realized.len(),
        });
    }
    if estimates.is_empty() {
        return Err(Error::SeriesTooShort { n: 0, required: 1 });
    }
    let s: f64 = estimates.iter().zip(realized).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(s / estimates.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodOutcome {
    pub interval: IntervalRecord,
    /// The method's point estimate of `Err_sto`.
    pub point: f64,
}

/// One simulated instance: its realized `Err_sto` and one outcome per
/// method, in the order of `ExperimentSpec::methods`.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub err_sto: f64,
    pub outcomes: Vec<Result<MethodOutcome>>,
}

fn qfcv_outcome(
    folds: &[FoldLosses],
    star: &[f64],
    m: usize,
    span: usize,
    alpha: f64,
    loss: &LossFn,
    n: usize,
) -> Result<MethodOutcome> {
    let pairs = pairs_from_losses(folds, m)?;
    let star_val = block_means(star, m)?;
    let fit = qfcv_interval(&pairs, &star_val, alpha, span)?;
    let point = qfcv_point(&pairs, &star_val, span)?;
    let interval = finish_interval(&fit, loss, MethodTag::Qfcv { m }, alpha, n + 1);
    Ok(MethodOutcome { interval, point })
}

/// Evaluates every method on instance `stream` of `data`.
pub fn replicate(spec: &ExperimentSpec, data: &DataSpec, oracle: &OracleQuantiles, stream: u64) -> Result<Replication> {
    let n = data.n();
    let series = data.simulate(n + spec.sizes.n_te, stream)?;
    let layout = spec.sizes.layout(n)?;
    let observed = series.prefix(n)?;
    let err_sto = realized_test_error(series.view(), &layout, &spec.forecaster, &spec.loss)?;
    let (folds, star) = compute_fold_losses(observed, &layout, &spec.forecaster, &spec.loss)?;
    let val: Vec<f64> = folds.iter().map(FoldLosses::val_mean).collect();
    let outcomes = spec
        .methods
        .iter()
        .map(|method| match *method {
            Method::Qfcv { m, memory_span } => qfcv_outcome(&folds, &star, m, memory_span, spec.alpha, &spec.loss, n),
            Method::Fcv { variant, k_trun } => {
                let e = FoldErrors::new(val.clone())?;
                let cfg = FcvConfig {
                    variant,
                    alpha: spec.alpha,
                    k_trun,
                };
                let mut interval = fcv_interval(&e, &cfg)?;
                interval.t = n + 1;
                Ok(MethodOutcome {
                    interval,
                    point: fcv_point(&e),
                })
            }
            Method::Oracle => Ok(MethodOutcome {
                interval: IntervalRecord::new(oracle.q05, oracle.q95, MethodTag::Oracle, spec.alpha, n + 1),
                point: oracle.mc_err,
            }),
        })
        .collect();
    Ok(Replication { err_sto, outcomes })
}

/// Per-method summary over replications. Rates are fractions; `_se` fields
/// are standard errors across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub method: String,
    pub sweep: Option<f64>,
    pub replications: usize,
    pub failures: usize,
    pub coverage_sto: f64,
    pub coverage_sto_se: f64,
    pub coverage_err: f64,
    pub coverage_err_se: f64,
    /// `Err_sto` above the interval.
    pub miscover_hi: f64,
    pub miscover_hi_se: f64,
    pub miscover_lo: f64,
    pub miscover_lo_se: f64,
    pub mean_length: f64,
    pub mean_length_se: f64,
    /// `mean_length / (q95 - q05)`.
    pub length_ratio: f64,
    pub length_ratio_se: f64,
    pub mean_point: f64,
    pub mean_point_se: f64,
    pub mse_point: f64,
    pub mse_point_se: f64,
}

impl MetricRow {
    pub const HEADER: [&'static str; 20] = [
        "method",
        "sweep",
        "replications",
        "failures",
        "coverage_sto",
        "coverage_sto_se",
        "coverage_err",
        "coverage_err_se",
        "miscover_hi",
        "miscover_hi_se",
        "miscover_lo",
        "miscover_lo_se",
        "mean_length",
        "mean_length_se",
        "length_ratio",
        "length_ratio_se",
        "mean_point",
        "mean_point_se",
        "mse_point",
        "mse_point_se",
    ];

    pub fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.method.clone(),
            self.sweep.map(|v| v.to_string()).unwrap_or_default(),
            self.replications.to_string(),
            self.failures.to_string(),
        ];
        r.extend(
            [
                self.coverage_sto,
                self.coverage_sto_se,
                self.coverage_err,
                self.coverage_err_se,
                self.miscover_hi,
                self.miscover_hi_se,
                self.miscover_lo,
                self.miscover_lo_se,
                self.mean_length,
                self.mean_length_se,
                self.length_ratio,
                self.length_ratio_se,
                self.mean_point,
                self.mean_point_se,
                self.mse_point,
                self.mse_point_se,
            ]
            .iter()
            .map(|v| v.to_string()),
        );
        r
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Summarizes method `j` over `reps`.
pub fn metric_row(
    method: &Method,
    j: usize,
    sweep: Option<f64>,
    reps: &[Result<Replication>],
    oracle: &OracleQuantiles,
) -> MetricRow {
    let mut cov = Vec::new();
    let mut cov_err = Vec::new();
    let mut hi = Vec::new();
    let mut lo = Vec::new();
    let mut len = Vec::new();
    let mut points = Vec::new();
    let mut sq = Vec::new();
    let mut failures = 0;
    for rep in reps {
        let Ok(rep) = rep else {
            failures += 1;
            continue;
        };
        let Ok(out) = &rep.outcomes[j] else {
            failures += 1;
            continue;
        };
        let iv = &out.interval;
        let e = rep.err_sto;
        cov.push(indicator(iv.contains(e)));
        hi.push(indicator(!iv.contains(e) && e > iv.hi));
        lo.push(indicator(!iv.contains(e) && e <= iv.hi));
        cov_err.push(indicator(iv.contains(oracle.mc_err)));
        len.push(iv.length());
        points.push(out.point);
        sq.push((out.point - e) * (out.point - e));
    }
    let (coverage_sto, coverage_sto_se) = mean_se(&cov);
    let (coverage_err, coverage_err_se) = mean_se(&cov_err);
    let (miscover_hi, miscover_hi_se) = mean_se(&hi);
    let (miscover_lo, miscover_lo_se) = mean_se(&lo);
    let (mean_length, mean_length_se) = mean_se(&len);
    let (mean_point, mean_point_se) = mean_se(&points);
    let (mse_point, mse_point_se) = mean_se(&sq);
    let w = oracle.width();
    MetricRow {
        method: method.label(),
        sweep,
        replications: cov.len(),
        failures,
        coverage_sto,
        coverage_sto_se,
        coverage_err,
        coverage_err_se,
        miscover_hi,
        miscover_hi_se,
        miscover_lo,
        miscover_lo_se,
        mean_length,
        mean_length_se,
        length_ratio: mean_length / w,
        length_ratio_se: mean_length_se / w,
        mean_point,
        mean_point_se,
        mse_point,
        mse_point_se,
    }
}

/// Everything produced at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub sweep: Option<f64>,
    pub oracle: OracleQuantiles,
    pub replications: Vec<Result<Replication>>,
    pub rows: Vec<MetricRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<SweepRun>,
}

impl ExperimentResult {
    pub fn rows(&self) -> impl Iterator<Item = &MetricRow> {
        self.runs.iter().flat_map(|r| r.rows.iter())
    }

    pub fn row(&self, method: &Method) -> Option<&MetricRow> {
        let label = method.label();
        self.rows().find(|r| r.method == label)
    }

    /// Replication failures over all sweep values (a failure of one method
    /// on one replication counts once).
    pub fn failures(&self) -> usize {
        self.rows().map(|r| r.failures).sum()
    }
}

pub fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    if spec.replications == 0 {
        return Err(Error::InvalidParameter {
            name: "replications",
            reason: "must be at least 1".into(),
        });
    }
    if !(spec.alpha > 0.0 && spec.alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must lie strictly inside (0, 1)".into(),
        });
    }
    spec.sizes.validate()?;
    spec.sizes.layout(spec.data.n())?;
    Ok(())
}

/// Runs all replications (in parallel) at each sweep value.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    validate_spec(spec)?;
    let points: Vec<(Option<f64>, DataSpec)> = if spec.sweep_phi.is_empty() {
        vec![(None, spec.data.clone())]
    } else {
        spec.sweep_phi
            .iter()
            .map(|&phi| Ok((Some(phi), spec.data.with_phi(phi)?)))
            .collect::<Result<_>>()?
    };
    let mut runs = Vec::with_capacity(points.len());
    for (sweep, data) in points {
        let oracle = oracle_quantiles(&data, &spec.forecaster, &spec.sizes, &spec.loss, spec.oracle_draws)?;
        let replications: Vec<Result<Replication>> = (0..spec.replications as u64)
            .into_par_iter()
            .map(|r| replicate(spec, &data, &oracle, r))
            .collect();
        let rows = spec
            .methods
            .iter()
            .enumerate()
            .map(|(j, m)| metric_row(m, j, sweep, &replications, &oracle))
            .collect();
        runs.push(SweepRun {
            sweep,
            oracle,
            replications,
            rows,
        });
    }
    Ok(ExperimentResult { runs })
}

/// Rolling AQFCV (and optionally plain QFCV) over simulated instances.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingSpec {
    /// `data.n()` is the run length `T`.
    pub data: DataSpec,
    pub forecaster: ForecasterSpec,
    pub qfcv: QfcvConfig,
    pub aci: AciParams,
    pub instances: usize,
    /// Also run plain QFCV on each instance.
    pub plain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingInstance {
    pub aqfcv: RollingRun,
    pub qfcv: Option<RollingRun>,
    /// Intervals returned as the whole line for lack of folds (AQFCV run).
    pub warmups: usize,
}

/// AQFCV and, with `plain`, QFCV over `series`. Fold losses and realized
/// errors are computed once and shared by both runs.
pub fn rolling_instance(
    series: &TimeSeries,
    forecaster: &ForecasterSpec,
    qfcv: &QfcvConfig,
    aci: &AciParams,
    plain: bool,
) -> Result<RollingInstance> {
    qfcv.validate()?;
    let mut realized_cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut realized = |s: usize| -> Result<f64> {
        if let Some(v) = realized_cache.get(&s) {
            return Ok(*v);
        }
        let v = rolling_realized_error(series.view(), forecaster, &qfcv.sizes, &qfcv.loss, s)?;
        realized_cache.insert(s, v);
        Ok(v)
    };
    let mut adaptive = AqfcvConstructor::new(forecaster, *qfcv, true);
    let aqfcv = run_acidf(series.view(), &mut adaptive, &mut realized, aci)?;
    let warmups = adaptive.warmups;
    let qfcv_run = if plain {
        let mut c = AqfcvConstructor::new(forecaster, *qfcv, false).with_cache(adaptive.into_cache());
        Some(run_acidf(series.view(), &mut c, &mut realized, aci)?)
    } else {
        None
    };
    Ok(RollingInstance {
        aqfcv,
        qfcv: qfcv_run,
        warmups,
    })
}

pub fn run_rolling(spec: &RollingSpec) -> Result<Vec<Result<RollingInstance>>> {
    spec.aci.validate()?;
    spec.qfcv.validate()?;
    if spec.instances == 0 {
        return Err(Error::InvalidParameter {
            name: "instances",
            reason: "must be at least 1".into(),
        });
    }
    let t = spec.aci.horizon;
    Ok((0..spec.instances as u64)
        .into_par_iter()
        .map(|i| {
            let series = spec.data.simulate(t, i)?;
            rolling_instance(&series, &spec.forecaster, &spec.qfcv, &spec.aci, spec.plain)
        })
        .collect())
}

/// Sample median (mean of the middle pair for even length); `NaN` when
/// empty.
pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfcv_core::forecast::RidgeSpec;
    use qfcv_core::sim::ArmaSpec;

    fn small_spec(methods: Vec<Method>) -> ExperimentSpec {
        let mut sim = SimSpec::sparse_linear(200, 0.5, 11);
        sim.p = 3;
        sim.beta = vec![1.0, 1.0, 0.0];
        ExperimentSpec {
            data: DataSpec::Linear(sim),
            forecaster: ForecasterSpec::Ridge(RidgeSpec::default()),
            sizes: WindowSizes::new(20, 5, 5, 1),
            loss: LossFn::Squared,
            alpha: 0.1,
            methods,
            replications: 30,
            oracle_draws: 200,
            sweep_phi: vec![],
        }
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse_point(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse_point(&[3.0, 3.0], &[2.0, 4.0]).unwrap(), 1.0);
        assert!(matches!(mse_point(&[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn method_keys_round_trip() {
        for m in [
            Method::qfcv(0),
            Method::qfcv(3),
            Method::fcv(FcvVariant::Naive),
            Method::fcv(FcvVariant::Autocov),
            Method::fcv(FcvVariant::Scaling),
            Method::Oracle,
        ] {
            assert_eq!(Method::parse(&m.key()), Some(m));
        }
        assert_eq!(Method::parse("qfcvx"), None);
    }

    #[test]
    fn zero_noise_oracle_is_zero() {
        let sim = SimSpec {
            n: 200,
            p: 2,
            beta: vec![1.0, -2.0],
            noise: NoiseSpec::Arma(ArmaSpec::white_noise()),
            noise_scale: 0.0,
            seed: 3,
        };
        let spec = RidgeSpec {
            lambda: 0.0,
            include_intercept: false,
        };
        let o = oracle_quantiles(
            &DataSpec::Linear(sim),
            &ForecasterSpec::Ridge(spec),
            &WindowSizes::new(10, 5, 5, 1),
            &LossFn::Squared,
            100,
        )
        .unwrap();
        assert!(o.q05.abs() < 1e-20 && o.q95.abs() < 1e-20 && o.mc_err.abs() < 1e-20);
    }

    #[test]
    fn oracle_method_self_test() {
        let spec = small_spec(vec![Method::Oracle, Method::qfcv(1), Method::fcv(FcvVariant::Scaling)]);
        let res = run_experiment(&spec).unwrap();
        let row = res.row(&Method::Oracle).unwrap();
        assert!((row.length_ratio - 1.0).abs() < 1e-12);
        for r in res.rows() {
            assert_eq!(r.replications + r.failures, 30);
            assert!((r.miscover_hi + r.miscover_lo - (1.0 - r.coverage_sto)).abs() < 1e-12);
        }
    }

    #[test]
    fn tables_do_not_depend_on_worker_count() {
        let spec = small_spec(vec![Method::qfcv(1), Method::fcv(FcvVariant::Naive)]);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| run_experiment(&spec)).unwrap();
        let b = three.install(|| run_experiment(&spec)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn median_values() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}
