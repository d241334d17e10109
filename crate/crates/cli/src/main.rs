mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{cmd_dims, cmd_eval, cmd_solve, cmd_verify, load, parse_complex, Outcome, Overrides};

/// Commuting differential operators for integral operators with Airy and
/// Bessel bispectral kernels.
///
/// Exit codes: 0 success; 1 config, contour or pole error; 2 an exact check
/// or dimension bound failed; 3 no nonconstant solution although one is
/// predicted; 4 commutator residual above tolerance; 5 no solution where none
/// is predicted; 6 internal consistency failure.
///
/// PROLATE_THREADS sets the worker thread count.
#[derive(Parser)]
#[command(name = "prolate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the job's Darboux data exactly.
    Verify(Common),
    /// Tabulate dim S1, dim S2, their sum and intersection against the bounds.
    Dims(Common),
    /// Solve for a commuting operator and certify it numerically.
    Solve(Common),
    /// Evaluate Psi(x, z) and its x-derivative.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Complex point, e.g. `0.5` or `1-2i`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Args)]
struct Common {
    /// Job file (TOML).
    config: PathBuf,
    /// Fixed l1 (solve) or the largest l1 (dims).
    #[arg(long)]
    l1: Option<usize>,
    #[arg(long)]
    l2: Option<usize>,
    /// Minimal-order search, overriding l1/l2 for `solve`.
    #[arg(long)]
    minimal: bool,
    /// Commutator residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Quadrature nodes on the first contour.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            l1: self.l1,
            l2: self.l2,
            minimal: self.minimal,
            tol: self.tol,
            grid: self.grid,
            out: self.out.clone(),
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var("PROLATE_THREADS") else {
        return Ok(());
    };
    let n: usize = text.trim().parse().with_context(|| format!("PROLATE_THREADS={text:?} is not a count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    configure_threads()?;
    match cli.command {
        Command::Verify(c) => cmd_verify(&load(&c.config, &c.overrides())?),
        Command::Dims(c) => {
            let job = load(&c.config, &c.overrides())?;
            let max = job.dims.max_l;
            cmd_dims(&job, c.l1.unwrap_or(max), c.l2.unwrap_or(max))
        }
        Command::Solve(c) => cmd_solve(&load(&c.config, &c.overrides())?),
        Command::Eval { common, x, z } => {
            let job = load(&common.config, &common.overrides())?;
            cmd_eval(&job, parse_complex(&x)?, parse_complex(&z)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            if let Some(d) = outcome.diagnostic {
                eprintln!("error: {d}");
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::code::CONFIG)
        }
    }
}
