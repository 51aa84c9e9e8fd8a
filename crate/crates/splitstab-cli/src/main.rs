use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use splitstab_cli::commands::{cmd_check, cmd_probe, cmd_solve, CheckArgs, ProbeArgs, SolveArgs};

/// Stability certificates for split equality and split feasibility problems.
#[derive(Parser)]
#[command(name = "splitstab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify whether the solution map is Lipschitz-like at the reference
    /// solution. Exit code: 0 = lipschitz_like, 1 = not_lipschitz_like,
    /// 2 = inconclusive.
    Check {
        /// Problem spec file (JSON).
        spec: PathBuf,
        /// Feasibility/decision tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Run the LP battery even when a shortcut applies and cross-check.
        #[arg(long)]
        debug_both: bool,
        /// Output report path (default: next to the spec).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sample matrix perturbations and report solution-drift ratios next to
    /// the certificate.
    Probe {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// RNG seed; identical seeds reproduce reports bit for bit.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per radius level.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Largest perturbation radius; five halvings follow.
        #[arg(long, default_value_t = 0.1)]
        r0: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run the projection solver. Exit code 0 exactly when it converged.
    Solve {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// JSON file with a start point: {"x": [...], "y": [...]}.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Check {
            spec,
            tol,
            debug_both,
            out,
        } => cmd_check(&CheckArgs {
            spec,
            tol,
            debug_both,
            out,
        }),
        Command::Probe {
            spec,
            tol,
            seed,
            samples,
            r0,
            out,
        } => cmd_probe(&ProbeArgs {
            spec,
            tol,
            seed,
            samples,
            r0,
            out,
        }),
        Command::Solve {
            spec,
            tol,
            start,
            max_iters,
            out,
        } => cmd_solve(&SolveArgs {
            spec,
            tol,
            start,
            max_iters,
            out,
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}
