use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfcv::app::{self, AppError, Command};
use qfcv::config::RunConfig;

#[derive(Parser)]
#[command(name = "qfcv", version, about = "Uncertainty intervals for time-series forecast errors")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML configuration file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set sim.phi=0.9`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Input CSV (`t,x1,...,xp,y`).
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Simulate a series and write it as CSV.
    Simulate,
    /// QFCV prediction interval for the next test window.
    Qfcv,
    /// FCV interval (variant from `fcv.variant`).
    Fcv,
    /// Rolling AQFCV intervals (ACI-DF around QFCV).
    Aqfcv,
    /// Replicated simulation study; writes one metric row per method.
    Evaluate,
}

fn quote(s: &str) -> String {
    format!("{:?}", s)
}

fn load(cli: &Cli) -> Result<RunConfig, AppError> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| AppError::Validation(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = cli.overrides.clone();
    if let Some(p) = &cli.input {
        overrides.push(format!("data.input={}", quote(&p.to_string_lossy())));
    }
    if let Some(p) = &cli.output {
        overrides.push(format!("data.output={}", quote(&p.to_string_lossy())));
    }
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(t) = cli.threads {
        overrides.push(format!("threads={t}"));
    }
    Ok(RunConfig::parse(&text, &overrides)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are validation errors; help and version are not errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cmd = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Qfcv => Command::Qfcv,
        Cmd::Fcv => Command::Fcv,
        Cmd::Aqfcv => Command::Aqfcv,
        Cmd::Evaluate => Command::Evaluate,
    };
    let result = load(&cli).and_then(|cfg| {
        if cfg.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.threads)
                .build_global()
                .map_err(|e| AppError::Runtime(e.to_string()))?;
        }
        app::run(cmd, &cfg)
    });
    match result {
        Ok(summary) => {
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
