//! Run configuration: a TOML file whose keys are flat dotted paths
//! (`sim.phi = 0.5`, or `phi = 0.5` under a `[sim]` table), overridden by
//! `--set key=value` flags.
//!
//! Every violation (unknown key, wrong type, out-of-range value) is
//! collected before reporting, and [`RunConfig::to_toml`] emits the fully
//! resolved configuration, which parses back to the same value.

use std::collections::BTreeMap;
use std::fmt;

use toml::{Table, Value};

use qfcv_core::aci::AciParams;
use qfcv_core::fcv::FcvVariant;
use qfcv_core::forecast::{ForecasterSpec, GarchSpec, LassoPenalty, LassoSpec, RidgeSpec};
use qfcv_core::layout::{WindowScheme, WindowSizes};
use qfcv_core::qfcv::{AuxSpec, QfcvConfig};
use qfcv_core::sim::{ArmaSpec, NoiseSpec, NonstationarySpec, SimSpec};
use qfcv_core::LossFn;

use crate::harness::{DataSpec, ExperimentSpec, GarchSim, Method, RollingSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    White,
    Ar1,
    Arma1_20,
    Nonstationary,
}

impl NoiseKind {
    fn name(&self) -> &'static str {
        match self {
            NoiseKind::White => "white",
            NoiseKind::Ar1 => "ar1",
            NoiseKind::Arma1_20 => "arma1_20",
            NoiseKind::Nonstationary => "nonstationary",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [NoiseKind::White, NoiseKind::Ar1, NoiseKind::Arma1_20, NoiseKind::Nonstationary]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimKind {
    Linear,
    Garch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecasterKind {
    Lasso,
    Ridge,
    Garch,
    Mean,
}

impl ForecasterKind {
    fn name(&self) -> &'static str {
        match self {
            ForecasterKind::Lasso => "lasso",
            ForecasterKind::Ridge => "ridge",
            ForecasterKind::Garch => "garch",
            ForecasterKind::Mean => "mean",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide. Never changes results.
    pub threads: usize,
    pub loss: LossFn,
    pub alpha: f64,

    pub input: Option<String>,
    pub output: Option<String>,

    pub sim_kind: SimKind,
    pub n: usize,
    pub p: usize,
    /// Leading coefficients equal to one when `beta` is empty.
    pub signal: usize,
    pub beta: Vec<f64>,
    pub noise: NoiseKind,
    pub phi: f64,
    pub noise_scale: f64,
    pub arima_phi: f64,
    pub variance_exponent: f64,
    pub burn_in: usize,
    pub garch_omega: f64,
    pub garch_tau: f64,
    pub garch_beta: f64,

    pub n_tr: usize,
    pub n_val: usize,
    pub n_te: usize,
    pub delta: usize,
    pub scheme: WindowScheme,

    pub forecaster: ForecasterKind,
    /// Fixed penalty; when absent Lasso uses `lambda_ratio * lambda_max`
    /// and ridge uses 1.
    pub lambda: Option<f64>,
    pub lambda_ratio: f64,
    pub intercept: bool,

    pub m: usize,
    pub memory_span: usize,

    pub fcv_variant: FcvVariant,
    pub k_trun: Option<usize>,

    pub gamma: f64,
    pub start: usize,
    pub instances: usize,
    pub plain: bool,

    pub replications: usize,
    pub oracle_draws: usize,
    pub methods: Vec<Method>,
    pub sweep_phi: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: 0,
            loss: LossFn::Squared,
            alpha: 0.1,
            input: None,
            output: None,
            sim_kind: SimKind::Linear,
            n: 1000,
            p: 20,
            signal: 4,
            beta: Vec::new(),
            noise: NoiseKind::Ar1,
            phi: 0.5,
            noise_scale: 1.0,
            arima_phi: 0.99,
            variance_exponent: 4.0,
            burn_in: 500,
            garch_omega: 0.1,
            garch_tau: 0.1,
            garch_beta: 0.8,
            n_tr: 40,
            n_val: 20,
            n_te: 20,
            delta: 1,
            scheme: WindowScheme::Rolling,
            forecaster: ForecasterKind::Lasso,
            lambda: None,
            lambda_ratio: 0.1,
            intercept: true,
            m: 1,
            memory_span: 1,
            fcv_variant: FcvVariant::Naive,
            k_trun: None,
            gamma: 0.01,
            start: 500,
            instances: 1,
            plain: true,
            replications: 500,
            oracle_draws: 2000,
            methods: vec![Method::qfcv(1), Method::fcv(FcvVariant::Naive)],
            sweep_phi: Vec::new(),
        }
    }
}

/// All accepted keys, in emission order.
pub const KEYS: &[&str] = &[
    "seed",
    "threads",
    "loss",
    "alpha",
    "data.input",
    "data.output",
    "sim.kind",
    "sim.n",
    "sim.p",
    "sim.signal",
    "sim.beta",
    "sim.noise",
    "sim.phi",
    "sim.noise_scale",
    "sim.arima_phi",
    "sim.variance_exponent",
    "sim.burn_in",
    "sim.garch_omega",
    "sim.garch_tau",
    "sim.garch_beta",
    "window.n_tr",
    "window.n_val",
    "window.n_te",
    "window.delta",
    "window.scheme",
    "forecaster.kind",
    "forecaster.lambda",
    "forecaster.lambda_ratio",
    "forecaster.intercept",
    "qfcv.m",
    "qfcv.memory_span",
    "fcv.variant",
    "fcv.k_trun",
    "aci.gamma",
    "aci.start",
    "aci.instances",
    "aci.plain",
    "evaluate.replications",
    "evaluate.oracle_draws",
    "evaluate.methods",
    "evaluate.sweep_phi",
];

fn flatten(table: &Table, prefix: &str, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => flatten(t, &key, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn as_f64(v: &Value) -> Result<f64, String> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(format!("expected a number, got {}", v.type_str())),
    }
}

fn as_usize(v: &Value) -> Result<usize, String> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        Value::Integer(i) => Err(format!("expected a nonnegative integer, got {i}")),
        _ => Err(format!("expected an integer, got {}", v.type_str())),
    }
}

fn as_str(v: &Value) -> Result<&str, String> {
    v.as_str().ok_or_else(|| format!("expected a string, got {}", v.type_str()))
}

fn as_bool(v: &Value) -> Result<bool, String> {
    v.as_bool().ok_or_else(|| format!("expected a boolean, got {}", v.type_str()))
}

fn as_f64_list(v: &Value) -> Result<Vec<f64>, String> {
    let arr = v.as_array().ok_or_else(|| format!("expected an array, got {}", v.type_str()))?;
    arr.iter().map(as_f64).collect()
}

fn variant_name(v: FcvVariant) -> &'static str {
    match v {
        FcvVariant::Naive => "naive",
        FcvVariant::Autocov => "autocov",
        FcvVariant::Scaling => "scaling",
    }
}

fn parse_variant(s: &str) -> Option<FcvVariant> {
    match s {
        "naive" => Some(FcvVariant::Naive),
        "autocov" => Some(FcvVariant::Autocov),
        "scaling" => Some(FcvVariant::Scaling),
        _ => None,
    }
}

fn choice<T>(s: &str, parsed: Option<T>, allowed: &str) -> Result<T, String> {
    parsed.ok_or_else(|| format!("unknown value {s:?} (expected one of {allowed})"))
}

impl RunConfig {
    fn apply(&mut self, key: &str, v: &Value) -> Result<(), String> {
        match key {
            "seed" => {
                self.seed = match v {
                    Value::Integer(i) if *i >= 0 => *i as u64,
                    _ => return Err("expected a nonnegative integer".into()),
                }
            }
            "threads" => self.threads = as_usize(v)?,
            "loss" => {
                let s = as_str(v)?;
                self.loss = match s {
                    "squared" => LossFn::Squared,
                    "absolute" => LossFn::Absolute,
                    _ => return Err(format!("unknown loss {s:?} (expected squared or absolute)")),
                }
            }
            "alpha" => self.alpha = as_f64(v)?,
            "data.input" => self.input = Some(as_str(v)?.to_string()),
            "data.output" => self.output = Some(as_str(v)?.to_string()),
            "sim.kind" => {
                let s = as_str(v)?;
                self.sim_kind = match s {
                    "linear" => SimKind::Linear,
                    "garch" => SimKind::Garch,
                    _ => return Err(format!("unknown simulation {s:?} (expected linear or garch)")),
                }
            }
            "sim.n" => self.n = as_usize(v)?,
            "sim.p" => self.p = as_usize(v)?,
            "sim.signal" => self.signal = as_usize(v)?,
            "sim.beta" => self.beta = as_f64_list(v)?,
            "sim.noise" => {
                let s = as_str(v)?;
                self.noise = choice(s, NoiseKind::parse(s), "white, ar1, arma1_20, nonstationary")?;
            }
            "sim.phi" => self.phi = as_f64(v)?,
            "sim.noise_scale" => self.noise_scale = as_f64(v)?,
            "sim.arima_phi" => self.arima_phi = as_f64(v)?,
            "sim.variance_exponent" => self.variance_exponent = as_f64(v)?,
            "sim.burn_in" => self.burn_in = as_usize(v)?,
            "sim.garch_omega" => self.garch_omega = as_f64(v)?,
            "sim.garch_tau" => self.garch_tau = as_f64(v)?,
            "sim.garch_beta" => self.garch_beta = as_f64(v)?,
            "window.n_tr" => self.n_tr = as_usize(v)?,
            "window.n_val" => self.n_val = as_usize(v)?,
            "window.n_te" => self.n_te = as_usize(v)?,
            "window.delta" => self.delta = as_usize(v)?,
            "window.scheme" => {
                let s = as_str(v)?;
                self.scheme = match s {
                    "rolling" => WindowScheme::Rolling,
                    "expanding" => WindowScheme::Expanding,
                    _ => return Err(format!("unknown scheme {s:?} (expected rolling or expanding)")),
                }
            }
            "forecaster.kind" => {
                let s = as_str(v)?;
                self.forecaster = choice(
                    s,
                    [ForecasterKind::Lasso, ForecasterKind::Ridge, ForecasterKind::Garch, ForecasterKind::Mean]
                        .into_iter()
                        .find(|k| k.name() == s),
                    "lasso, ridge, garch, mean",
                )?;
            }
            "forecaster.lambda" => self.lambda = Some(as_f64(v)?),
            "forecaster.lambda_ratio" => self.lambda_ratio = as_f64(v)?,
            "forecaster.intercept" => self.intercept = as_bool(v)?,
            "qfcv.m" => self.m = as_usize(v)?,
            "qfcv.memory_span" => self.memory_span = as_usize(v)?,
            "fcv.variant" => {
                let s = as_str(v)?;
                self.fcv_variant = choice(s, parse_variant(s), "naive, autocov, scaling")?;
            }
            "fcv.k_trun" => self.k_trun = Some(as_usize(v)?),
            "aci.gamma" => self.gamma = as_f64(v)?,
            "aci.start" => self.start = as_usize(v)?,
            "aci.instances" => self.instances = as_usize(v)?,
            "aci.plain" => self.plain = as_bool(v)?,
            "evaluate.replications" => self.replications = as_usize(v)?,
            "evaluate.oracle_draws" => self.oracle_draws = as_usize(v)?,
            "evaluate.methods" => {
                let arr = v.as_array().ok_or("expected an array of method names")?;
                let mut out = Vec::new();
                for item in arr {
                    let s = as_str(item)?;
                    out.push(choice(s, Method::parse(s), "qfcv<m>, fcv, fcv_c, fcv_p, oracle")?);
                }
                self.methods = out;
            }
            "evaluate.sweep_phi" => self.sweep_phi = as_f64_list(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn check(&self) -> Vec<String> {
        let mut e = Vec::new();
        let mut req = |ok: bool, key: &str, msg: &str| {
            if !ok {
                e.push(format!("{key}: {msg}"));
            }
        };
        req(self.seed <= i64::MAX as u64, "seed", "must fit in a signed 64-bit integer");
        req(self.alpha > 0.0 && self.alpha < 1.0, "alpha", "must lie strictly inside (0, 1)");
        req(self.n >= 1, "sim.n", "must be at least 1");
        req(
            self.beta.is_empty() || self.beta.len() == self.p,
            "sim.beta",
            "length must equal sim.p",
        );
        req(self.beta.iter().all(|b| b.is_finite()), "sim.beta", "must be finite");
        req(self.signal <= self.p, "sim.signal", "must be at most sim.p");
        req(self.phi.is_finite(), "sim.phi", "must be finite");
        req(
            self.noise_scale.is_finite() && self.noise_scale >= 0.0,
            "sim.noise_scale",
            "must be finite and >= 0",
        );
        req(self.arima_phi.is_finite(), "sim.arima_phi", "must be finite");
        req(self.variance_exponent >= 0.0, "sim.variance_exponent", "must be >= 0");
        req(self.garch_omega > 0.0, "sim.garch_omega", "must be > 0");
        req(
            self.garch_tau >= 0.0 && self.garch_beta >= 0.0 && self.garch_tau + self.garch_beta < 1.0,
            "sim.garch_tau",
            "need garch_tau, garch_beta >= 0 and garch_tau + garch_beta < 1",
        );
        for (k, v) in [
            ("window.n_tr", self.n_tr),
            ("window.n_val", self.n_val),
            ("window.n_te", self.n_te),
            ("window.delta", self.delta),
        ] {
            req(v >= 1, k, "must be at least 1");
        }
        if let Some(l) = self.lambda {
            req(l >= 0.0 && l.is_finite(), "forecaster.lambda", "must be finite and >= 0");
        }
        req(
            self.lambda_ratio >= 0.0 && self.lambda_ratio.is_finite(),
            "forecaster.lambda_ratio",
            "must be finite and >= 0",
        );
        req(self.m <= self.n_val, "qfcv.m", "must be at most window.n_val");
        req(self.memory_span >= 1, "qfcv.memory_span", "must be at least 1");
        req(self.gamma > 0.0 && self.gamma.is_finite(), "aci.gamma", "must be > 0");
        req(self.instances >= 1, "aci.instances", "must be at least 1");
        req(self.replications >= 1, "evaluate.replications", "must be at least 1");
        req(self.oracle_draws >= 100, "evaluate.oracle_draws", "must be at least 100");
        req(!self.methods.is_empty(), "evaluate.methods", "must name at least one method");
        for m in &self.methods {
            if let Method::Qfcv { m, .. } = m {
                req(*m <= self.n_val, "evaluate.methods", "qfcv<m> needs m <= window.n_val");
            }
        }
        req(
            self.sweep_phi.iter().all(|p| p.is_finite()),
            "evaluate.sweep_phi",
            "must be finite",
        );
        e
    }

    /// Parses TOML text, then applies `overrides` (`key=value`, the value
    /// in TOML syntax; bare words are taken as strings).
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut errors = Vec::new();
        let mut flat = BTreeMap::new();
        match text.parse::<Table>() {
            Ok(t) => flatten(&t, "", &mut flat),
            Err(e) => errors.push(format!("syntax: {e}")),
        }
        for o in overrides {
            let Some((k, raw)) = o.split_once('=') else {
                errors.push(format!("--set {o:?}: expected key=value"));
                continue;
            };
            let raw = raw.trim();
            let v = match format!("v = {raw}").parse::<Table>() {
                Ok(mut t) => t.remove("v").unwrap_or(Value::String(raw.to_string())),
                Err(_) => Value::String(raw.to_string()),
            };
            flat.insert(k.trim().to_string(), v);
        }
        let mut cfg = RunConfig::default();
        for (k, v) in &flat {
            if let Err(msg) = cfg.apply(k, v) {
                errors.push(format!("{k}: {msg}"));
            }
        }
        errors.extend(cfg.check());
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError(errors))
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let e = self.check();
        if e.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(e))
        }
    }

    fn value(&self, key: &str) -> Option<Value> {
        let f = Value::Float;
        let i = |v: usize| Value::Integer(v as i64);
        let s = |v: &str| Value::String(v.to_string());
        let floats = |v: &[f64]| Value::Array(v.iter().map(|x| Value::Float(*x)).collect());
        Some(match key {
            "seed" => Value::Integer(self.seed as i64),
            "threads" => i(self.threads),
            "loss" => s(self.loss.name()),
            "alpha" => f(self.alpha),
            "data.input" => s(self.input.as_deref()?),
            "data.output" => s(self.output.as_deref()?),
            "sim.kind" => s(match self.sim_kind {
                SimKind::Linear => "linear",
                SimKind::Garch => "garch",
            }),
            "sim.n" => i(self.n),
            "sim.p" => i(self.p),
            "sim.signal" => i(self.signal),
            "sim.beta" => floats(&self.beta),
            "sim.noise" => s(self.noise.name()),
            "sim.phi" => f(self.phi),
            "sim.noise_scale" => f(self.noise_scale),
            "sim.arima_phi" => f(self.arima_phi),
            "sim.variance_exponent" => f(self.variance_exponent),
            "sim.burn_in" => i(self.burn_in),
            "sim.garch_omega" => f(self.garch_omega),
            "sim.garch_tau" => f(self.garch_tau),
            "sim.garch_beta" => f(self.garch_beta),
            "window.n_tr" => i(self.n_tr),
            "window.n_val" => i(self.n_val),
            "window.n_te" => i(self.n_te),
            "window.delta" => i(self.delta),
            "window.scheme" => s(self.scheme.name()),
            "forecaster.kind" => s(self.forecaster.name()),
            "forecaster.lambda" => f(self.lambda?),
            "forecaster.lambda_ratio" => f(self.lambda_ratio),
            "forecaster.intercept" => Value::Boolean(self.intercept),
            "qfcv.m" => i(self.m),
            "qfcv.memory_span" => i(self.memory_span),
            "fcv.variant" => s(variant_name(self.fcv_variant)),
            "fcv.k_trun" => i(self.k_trun?),
            "aci.gamma" => f(self.gamma),
            "aci.start" => i(self.start),
            "aci.instances" => i(self.instances),
            "aci.plain" => Value::Boolean(self.plain),
            "evaluate.replications" => i(self.replications),
            "evaluate.oracle_draws" => i(self.oracle_draws),
            "evaluate.methods" => Value::Array(self.methods.iter().map(|m| Value::String(m.key())).collect()),
            "evaluate.sweep_phi" => floats(&self.sweep_phi),
            _ => return None,
        })
    }

    /// The resolved configuration as flat `key = value` lines.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            if let Some(v) = self.value(key) {
                out.push_str(&format!("{key} = {v}\n"));
            }
        }
        out
    }

    pub fn beta(&self) -> Vec<f64> {
        if !self.beta.is_empty() {
            return self.beta.clone();
        }
        let mut b = vec![0.0; self.p];
        b[..self.signal].iter_mut().for_each(|v| *v = 1.0);
        b
    }

    pub fn data_spec(&self) -> DataSpec {
        match self.sim_kind {
            SimKind::Linear => {
                let noise = match self.noise {
                    NoiseKind::White => NoiseSpec::Arma(ArmaSpec {
                        burn_in: self.burn_in,
                        ..ArmaSpec::white_noise()
                    }),
                    NoiseKind::Ar1 => NoiseSpec::Arma(ArmaSpec {
                        burn_in: self.burn_in,
                        ..ArmaSpec::ar1(self.phi)
                    }),
                    NoiseKind::Arma1_20 => NoiseSpec::Arma(ArmaSpec {
                        burn_in: self.burn_in,
                        ..ArmaSpec::arma1_20(self.phi)
                    }),
                    NoiseKind::Nonstationary => NoiseSpec::Nonstationary(NonstationarySpec {
                        arima_phi: self.arima_phi,
                        variance_growth_exponent: self.variance_exponent,
                        burn_in: self.burn_in,
                    }),
                };
                DataSpec::Linear(SimSpec {
                    n: self.n,
                    p: self.p,
                    beta: self.beta(),
                    noise,
                    noise_scale: self.noise_scale,
                    seed: self.seed,
                })
            }
            SimKind::Garch => DataSpec::Garch(GarchSim {
                n: self.n,
                omega: self.garch_omega,
                tau: self.garch_tau,
                beta: self.garch_beta,
                seed: self.seed,
            }),
        }
    }

    pub fn forecaster_spec(&self) -> ForecasterSpec {
        match self.forecaster {
            ForecasterKind::Lasso => ForecasterSpec::Lasso(LassoSpec {
                penalty: match self.lambda {
                    Some(l) => LassoPenalty::Fixed(l),
                    None => LassoPenalty::RelativeToMax(self.lambda_ratio),
                },
                include_intercept: self.intercept,
                ..LassoSpec::default()
            }),
            ForecasterKind::Ridge => ForecasterSpec::Ridge(RidgeSpec {
                lambda: self.lambda.unwrap_or(1.0),
                include_intercept: self.intercept,
            }),
            ForecasterKind::Garch => ForecasterSpec::Garch(GarchSpec::default()),
            ForecasterKind::Mean => ForecasterSpec::Mean,
        }
    }

    pub fn sizes(&self) -> WindowSizes {
        WindowSizes::new(self.n_tr, self.n_val, self.n_te, self.delta).with_scheme(self.scheme)
    }

    pub fn qfcv_config(&self) -> QfcvConfig {
        QfcvConfig {
            alpha: self.alpha,
            aux: AuxSpec { m: self.m },
            memory_span: self.memory_span,
            sizes: self.sizes(),
            loss: self.loss,
        }
    }

    /// ACI-DF parameters for a run of length `horizon`.
    pub fn aci_params(&self, horizon: usize) -> AciParams {
        AciParams {
            alpha: self.alpha,
            gamma: self.gamma,
            delta: self.delta,
            n_te: self.n_te,
            start: self.start,
            horizon,
        }
    }

    pub fn experiment(&self) -> ExperimentSpec {
        ExperimentSpec {
            data: self.data_spec(),
            forecaster: self.forecaster_spec(),
            sizes: self.sizes(),
            loss: self.loss,
            alpha: self.alpha,
            methods: self
                .methods
                .iter()
                .map(|m| match *m {
                    Method::Qfcv { m, .. } => Method::Qfcv {
                        m,
                        memory_span: self.memory_span,
                    },
                    Method::Fcv { variant, .. } => Method::Fcv {
                        variant,
                        k_trun: self.k_trun,
                    },
                    Method::Oracle => Method::Oracle,
                })
                .collect(),
            replications: self.replications,
            oracle_draws: self.oracle_draws,
            sweep_phi: self.sweep_phi.clone(),
        }
    }

    pub fn rolling(&self) -> RollingSpec {
        RollingSpec {
            data: self.data_spec(),
            forecaster: self.forecaster_spec(),
            qfcv: self.qfcv_config(),
            aci: self.aci_params(self.n),
            instances: self.instances,
            plain: self.plain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves_defaults() {
        let cfg = RunConfig::parse("seed = 7\n", &[]).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_tr, 40);
        let text = cfg.to_toml();
        assert!(text.contains("seed = 7"));
        assert!(text.contains("window.n_tr = 40"));
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::parse(
            "seed = 3\n[sim]\nnoise = \"arma1_20\"\nphi = 0.9\nnoise_scale = 0.2\n[evaluate]\nmethods = [\"qfcv0\", \"oracle\"]\nsweep_phi = [0.0, 0.5]\n[fcv]\nk_trun = 4\n",
            &["forecaster.lambda=0.25".into()],
        )
        .unwrap();
        let again = RunConfig::parse(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.k_trun, Some(4));
        assert_eq!(again.lambda, Some(0.25));
    }

    #[test]
    fn every_violation_is_listed() {
        let err = RunConfig::parse("alpha = 1.5\nbogus = 1\n[window]\nn_tr = 0\n", &["sim.noise=pink".into()]).unwrap_err();
        let all = err.0.join("\n");
        assert!(all.contains("alpha"), "{all}");
        assert!(all.contains("bogus: unknown key"), "{all}");
        assert!(all.contains("window.n_tr"), "{all}");
        assert!(all.contains("sim.noise"), "{all}");
        assert_eq!(err.0.len(), 4);
    }

    #[test]
    fn overrides_beat_file_values() {
        let cfg = RunConfig::parse("[sim]\nphi = 0.1\n", &["sim.phi=0.7".into(), "loss=absolute".into()]).unwrap();
        assert_eq!(cfg.phi, 0.7);
        assert_eq!(cfg.loss, LossFn::Absolute);
    }

    #[test]
    fn keys_are_complete() {
        let mut cfg = RunConfig::default();
        cfg.input = Some("a.csv".into());
        cfg.output = Some("b.csv".into());
        cfg.lambda = Some(1.0);
        cfg.k_trun = Some(2);
        for k in KEYS {
            assert!(cfg.value(k).is_some(), "{k}");
        }
    }
}
