//! `hinge`: simulate, reduce-check, certify, roots.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 near-collision
//! abort, 3 FAILURE certificate or failed replay.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hinge_core::hinge::OrderConvention;

#[derive(Parser, Debug)]
#[command(name = "hinge", version, about = "Hinged motions of the n-body problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Flat key = value initial-condition file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// lagrange-equilateral, kepler-pair, isosceles-balanced or random-seeded.
    #[arg(long)]
    preset: Option<String>,
    /// Seed for random-seeded.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of bodies for random-seeded.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the full dynamics; writes a trajectory CSV and prints a JSON summary.
    Simulate(RunArgs),
    /// Compare finite differences of the standard coordinates with the reduced equations.
    ReduceCheck {
        #[command(flatten)]
        run: RunArgs,
        /// Sampling grid spacing.
        #[arg(long, default_value_t = 2e-3)]
        h: f64,
    },
    /// Build the hinge certificate for n = 3 or 4.
    Certify {
        #[arg(long, required_unless_present = "replay")]
        n: Option<usize>,
        #[arg(long = "order-convention", default_value = "k13-largest")]
        order_convention: OrderConvention,
        /// Certificate JSON output path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-run a stored certificate and compare it field by field.
        #[arg(long, conflicts_with = "n")]
        replay: Option<PathBuf>,
        /// Disable the data-parallel paths.
        #[arg(long)]
        sequential: bool,
    },
    /// Count and isolate the real roots of a univariate polynomial in (lo, hi].
    Roots {
        poly: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "10", allow_hyphen_values = true)]
        hi: String,
        /// Maximum width of an isolating interval.
        #[arg(long, default_value = "1/1000000")]
        width: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(run) => commands::simulate(&run),
        Command::ReduceCheck { run, h } => commands::reduce_check(&run, h),
        Command::Certify {
            n,
            order_convention,
            out,
            replay,
            sequential,
        } => match replay {
            Some(path) => commands::replay(&path, sequential),
            None => commands::certify(n.unwrap_or_default(), order_convention, out.as_deref(), sequential),
        },
        Command::Roots { poly, lo, hi, width } => commands::roots(&poly, &lo, &hi, &width),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
