use std::path::PathBuf;
use std::process::ExitCode;

use chlab_cli::{parse_config, run, CliError, Outcome, RunOptions};
use clap::Parser;

/// Camassa-Holm numerical laboratory.
#[derive(Debug, Parser)]
#[command(name = "chlab", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Concurrent sweep children (default: one per core).
    #[arg(long)]
    workers: Option<usize>,

    /// Seed for the randomized verification suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Stop a simulation and exit with status 2 once breaking is detected.
    #[arg(long)]
    fail_on_breaking: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = match execute(&args) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            Outcome::of_error(&e)
        }
    };
    ExitCode::from(outcome.code() as u8)
}

fn execute(args: &Args) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let config = parse_config(&text)?;
    let options = RunOptions {
        out: args.out.clone(),
        workers: args.workers,
        seed: args.seed,
        fail_on_breaking: args.fail_on_breaking,
        verbose: true,
    };
    let report = run(&config, &options)?;
    println!("wrote {}", report.dir.display());
    Ok(report.outcome)
}
