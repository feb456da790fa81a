//! Subcommand implementations behind the `qfcv` binary.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use qfcv_core::aci::{instance_avg_coverage, RollingRun};
use qfcv_core::fcv::{fcv_interval, fcv_point, FcvConfig, FoldErrors};
use qfcv_core::qfcv::{compute_fold_losses, run_qfcv, FoldLosses};
use qfcv_core::sim::RngStream;
use qfcv_core::{Error, TimeSeries};

use crate::config::{ConfigError, RunConfig};
use crate::csvio::{self, CsvError};
use crate::harness::{self, median};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Qfcv,
    Fcv,
    Aqfcv,
    Evaluate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Qfcv => "qfcv",
            Command::Fcv => "fcv",
            Command::Aqfcv => "aqfcv",
            Command::Evaluate => "evaluate",
        }
    }
}

#[derive(Debug)]
pub enum AppError {
    /// Bad configuration or input data.
    Validation(String),
    /// Numerical or IO failure, or failed replications.
    Runtime(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 1,
            AppError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Validation(m) => write!(f, "validation error: {m}"),
            AppError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        AppError::Validation(e.to_string())
    }
}

impl From<CsvError> for AppError {
    fn from(e: CsvError) -> Self {
        match e {
            CsvError::Io(e) => AppError::Runtime(e.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::SeriesTooShort { .. } | Error::InsufficientFolds { .. } => {
                AppError::Validation(e.to_string())
            }
            other => AppError::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Runtime(e.to_string())
    }
}

/// Comment block written at the top of every output file.
pub fn provenance(cmd: Command, cfg: &RunConfig) -> String {
    // The output path does not affect results, so identical runs give identical files.
    let settings: String = cfg
        .to_toml()
        .lines()
        .filter(|l| !l.starts_with("data.output"))
        .map(|l| format!("{l}\n"))
        .collect();
    format!(
        "qfcv {} {}, rng {}\n{}",
        env!("CARGO_PKG_VERSION"),
        cmd.name(),
        RngStream::ALGORITHM,
        settings
    )
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, AppError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `out.csv` -> `out.<tag>.csv`.
pub fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}.{tag}.{ext}"))
}

/// The input CSV if configured, else simulation instance 0.
fn load_series(cfg: &RunConfig) -> Result<TimeSeries, AppError> {
    match &cfg.input {
        Some(p) => Ok(csvio::read_series_file(Path::new(p))?),
        None => Ok(cfg.data_spec().simulate(cfg.n, 0)?),
    }
}

/// Runs `cmd`; returns a one-line summary for the terminal.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<String, AppError> {
    cfg.validate()?;
    let prov = provenance(cmd, cfg);
    let out_path = cfg.output.as_deref().map(Path::new);
    match cmd {
        Command::Simulate => {
            let s = cfg.data_spec().simulate(cfg.n, 0)?;
            csvio::write_series(open_output(out_path)?, &s, &prov)?;
            Ok(format!("simulated {} points with p = {}", s.len(), s.dim()))
        }
        Command::Qfcv => {
            let s = load_series(cfg)?;
            let out = run_qfcv(s.view(), &cfg.forecaster_spec(), &cfg.qfcv_config())?;
            csvio::write_intervals(open_output(out_path)?, &[(out.interval, out.point)], &prov)?;
            Ok(format!(
                "{}: [{}, {}] from K = {} folds, point {}",
                out.interval.method,
                out.interval.lo,
                out.interval.hi,
                out.pairs.len(),
                out.point
            ))
        }
        Command::Fcv => {
            let s = load_series(cfg)?;
            let layout = cfg.sizes().layout(s.len())?;
            let (folds, _) = compute_fold_losses(s.view(), &layout, &cfg.forecaster_spec(), &cfg.loss)?;
            let e = FoldErrors::new(folds.iter().map(FoldLosses::val_mean).collect())?;
            let fcfg = FcvConfig {
                variant: cfg.fcv_variant,
                alpha: cfg.alpha,
                k_trun: cfg.k_trun,
            };
            let mut iv = fcv_interval(&e, &fcfg)?;
            iv.t = s.len() + 1;
            csvio::write_intervals(open_output(out_path)?, &[(iv, fcv_point(&e))], &prov)?;
            Ok(format!("{}: [{}, {}] from K = {} folds", iv.method, iv.lo, iv.hi, e.k()))
        }
        Command::Aqfcv => run_aqfcv(cfg, &prov, out_path),
        Command::Evaluate => {
            let res = harness::run_experiment(&cfg.experiment())?;
            let rows: Vec<_> = res.rows().cloned().collect();
            csvio::write_metrics(open_output(out_path)?, &rows, &prov)?;
            let failures = res.failures();
            if failures > 0 {
                return Err(AppError::Runtime(format!("{failures} replication failure(s); see the failures column")));
            }
            Ok(format!("{} metric rows", rows.len()))
        }
    }
}

fn coverage_line(label: &str, run: &RollingRun) -> String {
    format!(
        "{label}: time-average coverage {} over {} intervals",
        run.time_avg_coverage(),
        run.records.len()
    )
}

fn run_aqfcv(cfg: &RunConfig, prov: &str, out_path: Option<&Path>) -> Result<String, AppError> {
    if cfg.input.is_some() || cfg.instances == 1 {
        let s = load_series(cfg)?;
        let inst = harness::rolling_instance(
            &s,
            &cfg.forecaster_spec(),
            &cfg.qfcv_config(),
            &cfg.aci_params(s.len()),
            cfg.plain,
        )?;
        csvio::write_rolling(open_output(out_path)?, &inst.aqfcv, prov)?;
        let mut msg = coverage_line("AQFCV", &inst.aqfcv);
        if let Some(q) = &inst.qfcv {
            if let Some(p) = out_path {
                csvio::write_rolling(File::create(sibling(p, "qfcv"))?, q, prov)?;
            }
            msg.push_str("; ");
            msg.push_str(&coverage_line("QFCV", q));
        }
        return Ok(msg);
    }
    let runs = harness::run_rolling(&cfg.rolling())?;
    let mut rows = Vec::new();
    let mut by_method: Vec<(&str, Vec<RollingRun>)> = vec![("AQFCV", Vec::new()), ("QFCV", Vec::new())];
    let mut failures = 0;
    let mut first_error = None;
    for (i, r) in runs.iter().enumerate() {
        let inst = match r {
            Ok(inst) => inst,
            Err(e) => {
                failures += 1;
                first_error.get_or_insert_with(|| format!("instance {i}: {e}"));
                continue;
            }
        };
        let mut push = |label: &str, run: &RollingRun, warmups: usize| {
            rows.push(vec![
                i.to_string(),
                label.to_string(),
                run.records.len().to_string(),
                run.time_avg_coverage().to_string(),
                run.theta_path.last().copied().unwrap_or(0.0).to_string(),
                warmups.to_string(),
            ]);
        };
        push("AQFCV", &inst.aqfcv, inst.warmups);
        by_method[0].1.push(inst.aqfcv.clone());
        if let Some(q) = &inst.qfcv {
            push("QFCV", q, inst.warmups);
            by_method[1].1.push(q.clone());
        }
    }
    csvio::write_table(
        open_output(out_path)?,
        &["instance", "method", "intervals", "time_avg_coverage", "final_theta", "warmups"],
        &rows,
        prov,
    )?;
    if let Some(p) = out_path {
        let mut avg = Vec::new();
        for (label, runs) in &by_method {
            let Some(first) = runs.first() else { continue };
            for rec in &first.records {
                if let Some(c) = instance_avg_coverage(runs, rec.t) {
                    avg.push(vec![rec.t.to_string(), label.to_string(), c.to_string()]);
                }
            }
        }
        csvio::write_table(
            File::create(sibling(p, "instance_avg"))?,
            &["t", "method", "instance_avg_coverage"],
            &avg,
            prov,
        )?;
    }
    let mut parts = Vec::new();
    for (label, runs) in &by_method {
        if !runs.is_empty() {
            let c: Vec<f64> = runs.iter().map(RollingRun::time_avg_coverage).collect();
            parts.push(format!("{label} median time-average coverage {}", median(&c)));
        }
    }
    if failures > 0 {
        let first = first_error.unwrap_or_default();
        return Err(AppError::Runtime(format!("{failures} instance(s) failed, first {first}")));
    }
    Ok(parts.join("; "))
}
