//! Command-line driver: builds model-space bases from inner-function
//! configurations and runs the diagnostic commands.
//!
//! Exit codes: 0 success / all checks pass; 1 input, dimension, or check
//! failures; 2 truncation insufficiency.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ktheta::Error;

#[derive(Parser)]
#[command(
    name = "ktheta",
    version,
    about = "Model-space diagnostics: compressed shifts, kernels, and asymptotic decay"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model-space basis and persist it (JSON header + CSV matrix)
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the identity suite and print one PASS/WARN/FAIL line per identity
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Override the configuration seed for the random draws
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the operator-norm decay curve (CSV) and its verdict (JSON)
    Decay {
        #[arg(long)]
        config: PathBuf,
        /// Operator source: "random", "identity", or a path to a matrix CSV
        #[arg(long, default_value = "random")]
        operator: String,
        #[arg(long)]
        out: PathBuf,
        /// Iteration budget (default: max(4 d, 24))
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Decay verdict threshold relative to the operator norm
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Report the smallest singular value of A -> adjoint(S) A S - A
    FixedPoint {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a (perturbed) Toeplitz matrix on truncated H^2 into Toeplitz
    /// part plus residual
    H2 {
        /// Symbol CSV: header "m,re,im", one diagonal per row
        #[arg(long)]
        symbol: PathBuf,
        /// Optional additive perturbation, matrix CSV of matching size
        #[arg(long)]
        perturbation: Option<PathBuf>,
        /// Truncation order N
        #[arg(long)]
        order: usize,
        /// Shift count n* (requires 2 n* < N)
        #[arg(long)]
        nstar: usize,
        /// Output prefix: writes `<out>_t1.csv`, `<out>_k.csv`, `<out>_report.json`
        #[arg(long)]
        out: PathBuf,
        /// Diagonal-variance tolerance for the report
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Strong-convergence probes: per-probe decay curves and the bound check
    Probe {
        #[arg(long)]
        config: PathBuf,
        /// Output prefix: writes <out>_{operator,shift}_<i>.csv and
        /// <out>_report.json
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random probes
        #[arg(long, default_value_t = 10)]
        probes: usize,
    },
}

fn run(cli: Cli) -> ktheta::Result<i32> {
    match cli.command {
        Command::Build { config, out } => commands::cmd_build(&config, &out),
        Command::Verify { config, seed } => commands::cmd_verify(&config, seed),
        Command::Decay {
            config,
            operator,
            out,
            nmax,
            seed,
            tol,
        } => commands::cmd_decay(&config, &operator, &out, nmax, seed, tol),
        Command::FixedPoint { config, out } => commands::cmd_fixed_point(&config, out.as_deref()),
        Command::H2 {
            symbol,
            perturbation,
            order,
            nstar,
            out,
            tol,
        } => commands::cmd_h2(&symbol, perturbation.as_deref(), order, nstar, &out, tol),
        Command::Probe {
            config,
            out,
            nmax,
            seed,
            probes,
        } => commands::cmd_probe(&config, &out, nmax, seed, probes),
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of a pipe goes away (e.g. `ktheta ... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::TruncationInsufficient { .. } => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
