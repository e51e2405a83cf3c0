use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tscv::commands::{self, CommandError, Outcome, Overrides, EXIT_ERROR};

/// Calculus of variations on time scales.
#[derive(Parser)]
#[command(name = "tscv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print t, σ(t), ρ(t), μ(t) and the point classification on [t0, t1].
    Inspect(FileArgs),
    /// Evaluate the functional and the strong and weak norms of the trajectory.
    Eval(FileArgs),
    /// Solve the discrete Euler-Lagrange equations (exit 2 on non-convergence).
    Solve(FileArgs),
    /// Full classification: EL residual, convexity hypothesis, excess scan.
    /// Exit 0 consistent-with-strong-min, 3 necessary-condition-violated,
    /// 4 hypothesis-not-met.
    Analyze(FileArgs),
    /// Run a built-in reproduction: example-3.2, discrete-z, q-scale or all.
    Repro {
        #[arg(default_value = "all")]
        example: String,
        /// Write the machine-readable report here.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FileArgs {
    /// Problem file (JSON).
    file: PathBuf,
    /// Write the machine-readable report here.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Lower end of the excess-scan grid.
    #[arg(long, allow_hyphen_values = true)]
    q_min: Option<f64>,
    /// Upper end of the excess-scan grid.
    #[arg(long, allow_hyphen_values = true)]
    q_max: Option<f64>,
    /// Number of scan grid points.
    #[arg(long)]
    q_count: Option<usize>,
    /// Report excess values below -TOL.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature nodes per dense interval.
    #[arg(long)]
    resolution: Option<usize>,
    /// Newton iteration limit.
    #[arg(long)]
    max_iter: Option<usize>,
}

impl FileArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            q_min: self.q_min,
            q_max: self.q_max,
            q_count: self.q_count,
            tol: self.tol,
            resolution: self.resolution,
            max_iter: self.max_iter,
        }
    }
}

fn write_report(outcome: &Outcome, path: &Path) -> Result<(), String> {
    let json = outcome.report.to_json().map_err(|e| e.to_string())?;
    std::fs::write(path, json + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, report): (Result<Outcome, CommandError>, Option<PathBuf>) = match cli.command {
        Command::Repro { example, report } => (commands::repro(&example), report),
        Command::Inspect(a) => (commands::inspect(&a.file, &a.overrides()), a.report),
        Command::Eval(a) => (commands::eval(&a.file, &a.overrides()), a.report),
        Command::Solve(a) => (commands::solve(&a.file, &a.overrides()), a.report),
        Command::Analyze(a) => (commands::analyze(&a.file, &a.overrides()), a.report),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.text);
            if let Some(path) = report {
                if let Err(msg) = write_report(&outcome, &path) {
                    eprintln!("error: {msg}");
                    return ExitCode::from(EXIT_ERROR as u8);
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
