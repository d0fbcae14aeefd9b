//! `qcdim` binary: argument parsing and dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcdim_cli::commands;

/// Minimal-dimension compression of quantum observable sets.
#[derive(Parser)]
#[command(name = "qcdim", version, about, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze an observable file: block structure, compression
    /// dimension, geometric lower bound, and a verified scheme.
    Analyze {
        /// Observable file (JSON).
        input: PathBuf,
        /// Seed for all randomized stages.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Number of random states for the scheme check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Residual tolerance for the scheme verdict.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Synthesize a compression scheme and write it to a file.
    Compress {
        /// Observable file (JSON).
        input: PathBuf,
        /// Where to write the scheme file.
        #[arg(long)]
        scheme_out: PathBuf,
        /// Seed for all randomized stages.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Residual tolerance for the self-check verdict.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Verify a scheme file against an observable file.
    Verify {
        /// Observable file (JSON).
        input: PathBuf,
        /// Scheme file to verify.
        #[arg(long)]
        scheme: PathBuf,
        /// Number of random states to test.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Seed for the state sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Residual tolerance for the verdict (exit 5 above it).
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Generate a named example observable file.
    ///
    /// Examples: `gen degree3`, `gen irred 5`, `gen twoproj 6 42`,
    /// `gen planted reconstruction|qubit|remainder`.
    Gen {
        /// Example name: degree3, irred, twoproj, or planted.
        name: String,
        /// Numeric or variant parameters of the example.
        params: Vec<String>,
        /// Output path (stdout when omitted).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Geometric lower bound from the associated plane curve.
    LowerBound {
        /// Observable file (JSON).
        input: PathBuf,
        /// Seed for the random pair strategy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Force this many random pair draws (default: use the file's
        /// own pair when it has exactly one, else 4 draws).
        #[arg(long)]
        trials: Option<usize>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Canonical form of a pair of projections.
    TwoProj {
        /// Observable file (JSON) with exactly two projections.
        input: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            input,
            seed,
            json,
            trials,
            tol,
        } => commands::cmd_analyze(&input, seed, json, trials, tol),
        Command::Compress {
            input,
            scheme_out,
            seed,
            json,
            tol,
        } => commands::cmd_compress(&input, &scheme_out, seed, json, tol),
        Command::Verify {
            input,
            scheme,
            trials,
            seed,
            tol,
            json,
        } => commands::cmd_verify(&input, &scheme, trials, seed, tol, json),
        Command::Gen { name, params, out } => commands::cmd_gen(&name, &params, out.as_deref()),
        Command::LowerBound {
            input,
            seed,
            trials,
            json,
        } => commands::cmd_lower_bound(&input, seed, trials, json),
        Command::TwoProj { input, json } => commands::cmd_two_proj(&input, json),
    };
    match result {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(1)),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
