//! `hausdorff`: apply operators, sample symbols, run verification suites and
//! emit spectrum clouds from JSON operator specs.
//!
//! Exit codes: 0 all checks passed, 1 validation error, 2 check failure,
//! 3 refusal (node budget, grid resolution or series truncation).

mod apply;
mod error;
mod output;
mod spectrum;
mod symbol;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

/// Thread count for the worker pool; the default uses every core.
const THREADS_ENV: &str = "HAUSDORFF_THREADS";

#[derive(Parser)]
#[command(name = "hausdorff", version, about = "Generalized Hausdorff operators: apply, symbol, verify, spectrum")]
#[command(after_help = "Environment:\n  HAUSDORFF_THREADS  worker threads (default: all cores)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample Hf on x = exp(t) in the positive octant; CSV of (x, Re Hf, Im Hf).
    Apply {
        /// Operator spec JSON document
        #[arg(long)]
        spec: PathBuf,
        /// Library id (indicator01, gaussian, xexp, loggauss, saturating, one)
        /// or a CSV file of `x,value` or `x,re,im` rows.
        #[arg(long, default_value = "gaussian")]
        function: String,
        /// Points per axis [default: 129, 33, 9 for n = 1, 2, 3].
        #[arg(long)]
        grid_n: Option<usize>,
        /// Range of t = ln x, as `a,b`.
        #[arg(long, default_value = "-5,5", value_parser = parse_range, allow_hyphen_values = true)]
        t_range: (f64, f64),
        /// Output path [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the symbol φ(s); CSV of (s, Re φ, Im φ[, |closed − quadrature|]).
    Symbol {
        /// Operator spec JSON document
        #[arg(long)]
        spec: PathBuf,
        /// Range of every s axis, as `a,b`.
        #[arg(long, default_value = "-20,20", value_parser = parse_range, allow_hyphen_values = true)]
        s_range: (f64, f64),
        /// Points per axis [default: 201, 41, 11 for n = 1, 2, 3].
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long, value_enum, default_value_t = symbol::Mode::Both)]
        mode: symbol::Mode,
        /// Agreement tolerance in `both` mode.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        /// Operator spec JSON document
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        /// Override every suite tolerance [defaults: diag 1e-3, adjoint 1e-6,
        /// normality 1e-5, regularity 1e-2, inverse 1e-6].
        #[arg(long)]
        tol: Option<f64>,
        /// Random function pairs for the adjoint suite.
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symbol cloud on an s-grid as CSV, with a JSON summary of norm,
    /// invertibility and predicate violations.
    Spectrum {
        /// Operator spec JSON document
        #[arg(long)]
        spec: PathBuf,
        /// Range of every s axis, as `a,b` [default: -40,40].
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        s_range: Option<(f64, f64)>,
        /// Points per axis [default: 201].
        #[arg(long)]
        grid_n: Option<usize>,
        /// Membership slack [default: 1e-10].
        #[arg(long)]
        tol: Option<f64>,
        /// CSV output path [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary path [default: stderr].
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("need finite a < b, got {a},{b}"));
    }
    Ok((a, b))
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn check_grid_n(n: Option<usize>, min: usize) -> CliResult<()> {
    match n {
        Some(n) if n < min => Err(CliError::Validation(format!("--grid-n must be at least {min}"))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads()?;
    match cli.command {
        Command::Apply { spec, function, grid_n, t_range, out } => {
            check_grid_n(grid_n, 1)?;
            apply::run(&apply::ApplyArgs { spec, function, grid_n, t_range, out })
        }
        Command::Symbol { spec, s_range, grid_n, mode, tol, out } => {
            check_grid_n(grid_n, 1)?;
            symbol::run(&symbol::SymbolArgs { spec, s_range, grid_n, mode, tol, out })
        }
        Command::Verify { spec, suite, tol, pairs, out } => {
            verify::run(&verify::VerifyArgs { spec, suite, tol, pairs, out })
        }
        Command::Spectrum { spec, s_range, grid_n, tol, out, summary } => {
            check_grid_n(grid_n, 3)?;
            spectrum::run(&spectrum::SpectrumArgs { spec, s_range, grid_n, tol, out, summary })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
