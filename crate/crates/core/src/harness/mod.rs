//! The `qsnom` command line: config handling, subcommands, exit codes.
//!
//! ```text
//! qsnom simulate|sweep|invert|oracle-check --config <path> [--set key=value ...] --out <path>
//! ```
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 model or
//! runtime error, 4 I/O error.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

pub use config::{ConfigError, RunConfig};

use crate::closed_form::consistency_report;
use crate::error::Error;
use crate::inversion::invert_permittivity;
use crate::sweep::run_sweep;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "qsnom",
    version,
    about = "Quantum s-SNOM tip/image-dipole model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point and print the scattered-photon report
    Simulate(CommonArgs),
    /// Sweep one parameter and write a CSV table
    Sweep(CommonArgs),
    /// Recover epsilon_d from an observed scattered frequency
    Invert(CommonArgs),
    /// Compare closed forms with the perturbation engine and exact diagonalization
    OracleCheck(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// override one config key
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// output file; a `.meta` sidecar is written next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(#[from] Error),
    #[error("every oracle-check row failed (alpha = {alphas}): {first}")]
    AllRowsFailed { alphas: String, first: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            HarnessError::Model(e) if e.is_validation() => EXIT_CONFIG,
            HarnessError::Model(_) | HarnessError::AllRowsFailed { .. } => EXIT_MODEL,
            HarnessError::Io { .. } => EXIT_IO,
        }
    }
}

/// What a subcommand produced: text for stdout and an optional file body.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub stdout: String,
    pub file_body: Option<String>,
    pub warnings: Vec<String>,
}

fn fmt_beta(beta: &[f64; 4]) -> String {
    beta.iter()
        .map(|b| output::format_float(*b))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput, HarnessError> {
    let m = &cfg.model;
    m.validate()?;
    let e = m.evaluate()?;
    let f = output::format_float;
    let mut s = String::new();
    let _ = writeln!(s, "epsilon_d        = {}", f(m.epsilon_d));
    let _ = writeln!(s, "alpha            = {}", f(e.alpha));
    let _ = writeln!(s, "g_eV             = {}", f(e.g));
    let _ = writeln!(s, "delta_e_eV       = {}", f(e.delta_e_paper));
    let _ = writeln!(s, "delta_e_oracle_eV = {}", f(e.delta_e_oracle));
    let _ = writeln!(s, "omega_s          = {}", f(e.omega_s));
    let _ = writeln!(s, "beta             = [{}]", fmt_beta(&e.beta.beta));
    let _ = writeln!(s, "amplitude        = {}", f(e.amplitude));
    let _ = writeln!(s, "photon_state     = |1>");
    let _ = writeln!(
        s,
        "near_field       = {} (ratio {}, factor {})",
        if e.near_field.passes { "pass" } else { "fail" },
        f(e.near_field.ratio),
        e.near_field.factor
    );
    let warnings: Vec<String> = e.warnings.iter().map(|w| w.to_string()).collect();
    for w in &warnings {
        let _ = writeln!(s, "warning          = {w}");
    }
    Ok(CommandOutput {
        file_body: Some(s.clone()),
        stdout: s,
        warnings,
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<CommandOutput, HarnessError> {
    let spec = cfg.sweep_spec()?;
    spec.validate()?;
    let table = run_sweep(&spec)?;
    let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
    let mut warnings = Vec::new();
    if failed > 0 {
        warnings.push(format!(
            "{failed} of {} sweep points failed",
            table.rows.len()
        ));
    }
    for tag in ["near_field", "non_perturbative"] {
        let n = table
            .rows
            .iter()
            .filter_map(|r| r.evaluation.as_ref())
            .filter(|e| e.warnings.iter().any(|w| w.tag() == tag))
            .count();
        if n > 0 {
            warnings.push(format!("{n} of {} sweep points: {tag}", table.rows.len()));
        }
    }
    Ok(CommandOutput {
        stdout: format!("{} rows\n", table.rows.len()),
        file_body: Some(output::sweep_csv(&table)),
        warnings,
    })
}

pub fn cmd_invert(cfg: &RunConfig) -> Result<CommandOutput, HarnessError> {
    cfg.model.validate()?;
    let problem = cfg.inversion_problem()?;
    problem.validate()?;
    let inv = invert_permittivity(&problem)?;
    let f = output::format_float;
    let mut s = String::new();
    let _ = writeln!(s, "observed_omega_s = {}", f(problem.observed_omega_s));
    let _ = writeln!(s, "forward_path     = {}", problem.path);
    let _ = writeln!(s, "epsilon_d        = {}", f(inv.epsilon_d));
    let _ = writeln!(s, "iterations       = {}", inv.iterations);
    let _ = writeln!(s, "residual         = {}", f(inv.residual));
    Ok(CommandOutput {
        file_body: Some(s.clone()),
        stdout: s,
        warnings: Vec::new(),
    })
}

pub fn cmd_oracle_check(cfg: &RunConfig) -> Result<CommandOutput, HarnessError> {
    cfg.model.validate()?;
    let report = consistency_report(&cfg.consistency_params())?;
    let failed: Vec<&crate::closed_form::ConsistencyRow> =
        report.rows.iter().filter(|r| r.error.is_some()).collect();
    if !report.rows.is_empty() && failed.len() == report.rows.len() {
        let mut alphas: Vec<String> = failed.iter().map(|r| r.alpha.to_string()).collect();
        alphas.dedup();
        return Err(HarnessError::AllRowsFailed {
            alphas: alphas.join(", "),
            first: failed[0].error.clone().unwrap_or_default(),
        });
    }
    let mut warnings: Vec<String> = failed
        .iter()
        .map(|r| {
            format!(
                "alpha = {}, R = {}: {}",
                r.alpha,
                r.r_nm,
                r.error.as_deref().unwrap_or("")
            )
        })
        .collect();
    let mut s = String::new();
    for fit in &report.fits {
        let exp = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            s,
            "alpha = {}: paper exponent {}, oracle exponent {}, exact exponent {}{}",
            fit.alpha,
            exp(fit.paper_exponent),
            exp(fit.oracle_exponent),
            exp(fit.exact_exponent),
            if fit.discrepant {
                "  [discrepancy]"
            } else {
                ""
            }
        );
    }
    if report.discrepancy_flagged() {
        warnings.push("closed-form and oracle R-scaling exponents disagree".into());
    }
    Ok(CommandOutput {
        stdout: s,
        file_body: Some(output::oracle_csv(&report)),
        warnings,
    })
}

fn init_logging() {
    let level = match std::env::var("QSNOM_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Info,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

fn meta_text(command: &str, cfg: &RunConfig, out: &CommandOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "qsnom_version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "command = {command}");
    s.push_str(&cfg.render());
    for w in &out.warnings {
        let _ = writeln!(s, "warning = {w}");
    }
    s
}

fn execute(command: &Command) -> Result<(), HarnessError> {
    let (name, args) = match command {
        Command::Simulate(a) => ("simulate", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Invert(a) => ("invert", a),
        Command::OracleCheck(a) => ("oracle-check", a),
    };
    let text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let cfg = RunConfig::from_sources(text.as_deref(), &args.set)?;

    let needs_out = matches!(command, Command::Sweep(_) | Command::OracleCheck(_));
    if needs_out && args.out.is_none() {
        return Err(ConfigError(format!("{name} needs --out <path>")).into());
    }

    let result = match command {
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::Invert(_) => cmd_invert(&cfg),
        Command::OracleCheck(_) => cmd_oracle_check(&cfg),
    }?;

    for w in &result.warnings {
        warn!("{w}");
    }
    print!("{}", result.stdout);
    if let (Some(path), Some(body)) = (&args.out, &result.file_body) {
        write_output(path, body, &meta_text(name, &cfg, &result))?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn write_output(path: &Path, body: &str, meta: &str) -> Result<(), HarnessError> {
    output::write_with_meta(path, body, meta).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging();
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("qsnom: {e}");
            if let HarnessError::Model(Error::OutOfBracket {
                lowest, highest, ..
            }) = e
            {
                eprintln!("qsnom: attainable omega_s range is [{lowest}, {highest}]");
            }
            code
        }
    }
}
