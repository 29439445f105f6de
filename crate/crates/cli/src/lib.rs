//! Command-line front end: argument parsing, configuration merging, the
//! experiments, and report output.

pub mod commands;
pub mod config;
pub mod parse;
pub mod report;

use clap::{Args, Parser, Subcommand};
use config::{settings_from_file, tolerance_flags, RunConfig, Settings, ValidationError};
use std::path::PathBuf;

/// Exit status when every declared tolerance is met.
pub const EXIT_PASS: i32 = 0;
/// Exit status when a check misses its tolerance or a computation fails.
pub const EXIT_TOLERANCE: i32 = 1;
/// Exit status for rejected input.
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hypconf", version, about = "Connection, Stokes and monodromy data of the Gauss and Kummer equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    /// TOML file of settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override a tolerance; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Report format: json, csv or pretty.
    #[arg(long, global = true)]
    pub format: Option<String>,
}

/// Complex values are `re[,im]` or `mag@argdeg`; parts may be rationals `p/q`.
#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// gauss or kummer.
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate a local frame and its ODE residual.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        /// Gauss: 0, 1, inf, hat1, hatinf. Kummer: 0, inf.
        #[arg(long)]
        frame: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Closed-form connection matrices, checked by continuation.
    Connection {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Kummer Stokes matrices, checked by continuation.
    Stokes {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Monodromy matrices and the cyclic relation.
    Monodromy {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Rescaled Gauss data against their Kummer limits along a ray in alpha.
    ConfluenceSweep {
        #[command(flatten)]
        params: ParamArgs,
        /// S0, Sm1, C0Inf, M0 or MInf.
        #[arg(long)]
        target: Option<String>,
        /// Argument of alpha in degrees (+90 or -90).
        #[arg(long, allow_hyphen_values = true)]
        arg_alpha: Option<String>,
        /// Comma-separated, increasing.
        #[arg(long)]
        magnitudes: Option<String>,
    },
    /// Barnes integrals against series values.
    MbCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Invariant suite over seeded random parameter draws.
    VerifyAll {
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        draws: Option<String>,
    },
    /// Re-run a JSON report and compare its residuals bit for bit.
    Replay { report: PathBuf },
}

fn put(s: &mut Settings, key: &str, v: &Option<String>) {
    if let Some(v) = v {
        s.insert(key.to_string(), v.clone());
    }
}

fn put_params(s: &mut Settings, p: &ParamArgs) {
    put(s, "alpha", &p.alpha);
    put(s, "beta", &p.beta);
    put(s, "gamma", &p.gamma);
    put(s, "family", &p.family);
}

/// Settings from the config file, overridden by flags.
pub fn settings_from_cli(cli: &Cli) -> Result<Settings, ValidationError> {
    let mut s = match &cli.config {
        Some(path) => settings_from_file(path)?,
        None => Settings::new(),
    };
    let name = match &cli.command {
        Cmd::Eval { params, frame, at } => {
            put_params(&mut s, params);
            put(&mut s, "frame", frame);
            put(&mut s, "at", at);
            "eval"
        }
        Cmd::Connection { params } => {
            put_params(&mut s, params);
            "connection"
        }
        Cmd::Stokes { params } => {
            put_params(&mut s, params);
            "stokes"
        }
        Cmd::Monodromy { params } => {
            put_params(&mut s, params);
            "monodromy"
        }
        Cmd::ConfluenceSweep { params, target, arg_alpha, magnitudes } => {
            put_params(&mut s, params);
            put(&mut s, "target", target);
            put(&mut s, "arg-alpha", arg_alpha);
            put(&mut s, "magnitudes", magnitudes);
            "confluence-sweep"
        }
        Cmd::MbCheck { params, at } => {
            put_params(&mut s, params);
            put(&mut s, "at", at);
            "mb-check"
        }
        Cmd::VerifyAll { seed, draws } => {
            put(&mut s, "seed", seed);
            put(&mut s, "draws", draws);
            "verify-all"
        }
        Cmd::Replay { .. } => "replay",
    };
    s.insert("command".into(), name.into());
    s.extend(tolerance_flags(&cli.tol)?);
    put(&mut s, "format", &cli.format);
    put(&mut s, "output", &cli.output.as_ref().map(|p| p.display().to_string()));
    Ok(s)
}

/// Parse, run and report; returns the exit status.
pub fn execute(cli: &Cli) -> i32 {
    match try_execute(cli) {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            eprintln!("hypconf: invalid input: {e}");
            EXIT_INVALID
        }
        Err(Failure::Compute(e)) => {
            eprintln!("hypconf: computation failed: {e}");
            EXIT_TOLERANCE
        }
    }
}

enum Failure {
    Invalid(String),
    Compute(String),
}

impl From<ValidationError> for Failure {
    fn from(e: ValidationError) -> Self {
        Failure::Invalid(e.0)
    }
}

impl From<commands::ComputeError> for Failure {
    fn from(e: commands::ComputeError) -> Self {
        Failure::Compute(e.0)
    }
}

fn try_execute(cli: &Cli) -> Result<i32, Failure> {
    let flags = settings_from_cli(cli)?;
    let (report, format, output) = if let Cmd::Replay { report } = &cli.command {
        let text = std::fs::read_to_string(report).map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", report.display())))?;
        let recorded = report::read_recorded(&text).map_err(Failure::Invalid)?;
        // the report fixes the run; only output options come from the flags
        let mut s = recorded.config.clone();
        for k in ["format", "output"] {
            if let Some(v) = flags.get(k) {
                s.insert(k.into(), v.clone());
            }
        }
        let cfg = RunConfig::from_settings(&s)?;
        (commands::replay(&recorded, &cfg)?, cfg.format, cfg.output_path)
    } else {
        let cfg = RunConfig::from_settings(&flags)?;
        (commands::run(&cfg)?, cfg.format, cfg.output_path.clone())
    };
    let text = report.render(format);
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    for f in report.failures() {
        eprintln!("hypconf: check failed: {f}");
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_TOLERANCE })
}
