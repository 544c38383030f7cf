use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use garding_lab::{json, resolve_seed, CliError, RunConfig, SuiteSelection, DEFAULT_REFINE, DEFAULT_SAMPLES, SEED_ENV};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "garding-lab", version, about = "Checks for Gårding operators on symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and emit a JSON report.
    Check {
        #[arg(long)]
        spec: PathBuf,
        /// Suite to run (repeatable or comma separated); `all` by default.
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<SuiteSelection>,
        /// Defaults to $GARDING_LAB_SEED, then to a fixed seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE)]
        refine: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate g(A).
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Gårding eigenvalues of A in direction B (the identity by default).
    Eigen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        direction: Option<PathBuf>,
    },
    /// Polynomial x ↦ g(h·diag(x)·hᵗ).
    RestrictDiag {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        h: Option<PathBuf>,
    },
}

fn print<T: Serialize>(value: &T) {
    print!("{}", json::to_string(value).expect("output serializes"));
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Check { spec, suites, seed, samples, refine, out } => {
            let env = std::env::var(SEED_ENV).ok();
            let seed = resolve_seed(seed, env.as_deref())?;
            let to_stdout = out.is_none();
            let config = RunConfig::new(spec, suites, seed, samples, refine, out)?;
            let report = garding_lab::run(&config)?;
            if to_stdout {
                print!("{}", report.to_json());
            }
            for suite in report.suites.iter().filter(|s| !s.pass) {
                eprintln!("{}: FAIL ({})", suite.suite, suite.failing.as_deref().unwrap_or("unnamed"));
            }
            Ok(report.exit_code())
        }
        Command::Eval { spec, matrix } => {
            print(&garding_lab::eval(&spec, &matrix)?);
            Ok(0)
        }
        Command::Eigen { spec, matrix, direction } => {
            print(&garding_lab::eigen(&spec, &matrix, direction.as_deref())?);
            Ok(0)
        }
        Command::RestrictDiag { spec, h } => {
            print(&garding_lab::restrict_diag(&spec, h.as_deref())?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
