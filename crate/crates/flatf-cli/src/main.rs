use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Exact computation and verification of formal flat F-manifold structures
/// for polynomial Landau-Ginzburg potentials.
#[derive(Parser)]
#[command(name = "flatf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the recursion on a problem file and write the result document.
    Compute {
        /// Problem JSON file.
        problem: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the problem's truncation level.
        #[arg(long)]
        max_level: Option<usize>,
        /// Directory for the basis cache (FLATF_CACHE_DIR overrides).
        #[arg(long)]
        cache_dir: Option<String>,
    },
    /// Re-check a result document without recomputing it.
    Verify {
        /// Result JSON file produced by `compute`.
        result: PathBuf,
        /// Comma-separated checks: fqm11, flatf, unit. Default: fqm11,flatf.
        #[arg(long)]
        checks: Option<String>,
    },
    /// Run the graded-algebra axiom suite on seeded random elements.
    Axioms {
        /// Problem JSON file.
        problem: PathBuf,
        /// Number of random trials.
        #[arg(long, default_value_t = 200)]
        trials: u64,
        /// PRNG seed; equal seeds give byte-identical reports.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the computed quotient basis and its completeness flag.
    Basis {
        /// Problem JSON file.
        problem: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Compute {
            problem,
            out,
            max_level,
            cache_dir,
        } => flatf_cli::cmd_compute(&problem, out.as_deref(), max_level, cache_dir.as_deref()),
        Command::Verify { result, checks } => flatf_cli::cmd_verify(&result, checks.as_deref()),
        Command::Axioms {
            problem,
            trials,
            seed,
        } => flatf_cli::cmd_axioms(&problem, trials, seed),
        Command::Basis { problem } => flatf_cli::cmd_basis(&problem),
    };
    ExitCode::from(code as u8)
}
