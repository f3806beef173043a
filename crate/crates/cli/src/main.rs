use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracrd::par;
use fracrd_cli::commands::{self, parse_bc};
use fracrd_cli::CliError;

#[derive(Parser)]
#[command(
    name = "fracrd",
    version,
    about = "Fractional reaction-diffusion solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a model described by a config file.
    Run { config: PathBuf },
    /// Refinement study against a manufactured solution (CSV on stdout).
    Converge {
        #[arg(long)]
        example: String,
        #[arg(long)]
        alpha: f64,
        /// Defaults to the example's own boundary condition.
        #[arg(long)]
        bc: Option<String>,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Trace |r(x, y)| = 1 for each y and write the points as CSV.
    Stability {
        /// Comma-separated, all <= 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 512)]
        ntheta: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dense cross-check of the transform path on a small 1D grid.
    OracleCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bc: String,
        #[arg(long)]
        alpha: f64,
    },
}

fn threads() -> Result<Option<usize>, CliError> {
    match std::env::var("FRACRD_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "FRACRD_THREADS must be a positive integer, got `{v}`"
                ))
            }),
        Err(_) => Ok(None),
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config } => {
            let out = commands::run_file(&config)?;
            println!(
                "wrote {} snapshot(s), {} image(s) and {}",
                out.snapshots.len(),
                out.images.len(),
                out.summary.display()
            );
        }
        Command::Converge {
            example,
            alpha,
            bc,
            levels,
        } => {
            let bc = bc.as_deref().map(parse_bc).transpose()?;
            commands::converge(&example, alpha, bc, levels, &mut io::stdout().lock())?;
        }
        Command::Stability { y, ntheta, out } => {
            let rows = commands::stability(&y, ntheta, &out)?;
            println!("wrote {rows} boundary points to {}", out.display());
        }
        Command::OracleCheck { n, bc, alpha } => {
            commands::oracle_check(n, parse_bc(&bc)?, alpha, &mut io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = threads().and_then(|t| par::with_threads(t, || dispatch(cli.command)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracrd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
