//! `repchan`: build, apply and analyze repeated-interaction channels.
//!
//! Exit codes: 0 success, 2 input parse or I/O error, 3 validation error,
//! 4 numerical failure.

mod commands;
mod defaults;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "repchan", version, about = "Repeated-interaction quantum channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a channel spec JSON.
    #[command(subcommand)]
    Make(MakeCommand),
    /// Apply the channel of `--spec` to the state in `--state`.
    Apply(ApplyArgs),
    /// Rank, kernel and fixed point of the channel.
    Analyze(AnalyzeArgs),
    /// Iterate the channel from `--state`; writes a CSV trajectory.
    Iterate(IterateArgs),
    /// Uniqueness statistics over Haar-random unitaries.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum MakeCommand {
    /// Phase-decorated cyclic shift on the n² product states.
    Circulant(CirculantArgs),
    /// Haar-random unitary on C^n ⊗ C^n.
    Haar(HaarArgs),
    /// U = cos θ I + i sin θ σˣ⊗σˣ on two qubits.
    Sigmaxx(SigmaxxArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CirculantArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Comma-separated unimodular phases such as `i,1,-1,0.6+0.8i`.
    #[arg(long, conflicts_with = "angles")]
    pub phases: Option<String>,
    /// Comma-separated phase angles in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Comma-separated environment spectrum.
    #[arg(long)]
    pub spectrum: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct HaarArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    #[arg(long)]
    pub spectrum: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SigmaxxArgs {
    #[arg(long, default_value_t = defaults::THETA, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = defaults::P1)]
    pub p1: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub state: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Add the closed-form two-dimensional certificate (n = 2 only).
    #[arg(long)]
    pub dim2: bool,
    /// Relative determinant tolerance of the certificate.
    #[arg(long, default_value_t = defaults::CERTIFICATE_TOL)]
    pub tol: f64,
    /// Absolute singular-value cutoff replacing the relative rank policy.
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, default_value_t = defaults::ITERATE_STEPS)]
    pub steps: usize,
    #[arg(long, default_value_t = defaults::ITERATE_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = defaults::SWEEP_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    #[arg(long)]
    pub spectrum: Option<String>,
    /// Worker threads; all available cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Summary JSON file; stderr when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Per-sample CSV; stdout when absent.
    #[command(flatten)]
    pub output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Make(m) => commands::make(m),
        Command::Apply(a) => commands::apply(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Iterate(a) => commands::iterate(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
