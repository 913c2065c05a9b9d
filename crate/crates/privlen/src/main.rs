use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use privlen::families::Family;
use privlen::run::DEFAULT_SEED;
use privlen::{run, Command, OutputFormat, RunConfig};
use privlen_core::Tolerances;

/// Perfectly private variable-length coding: bounds, optimal zero-leakage
/// mechanisms, code construction and exact audits.
#[derive(Debug, Parser)]
#[command(name = "privlen", version)]
struct Cli {
    /// Distribution file (`joint:` or `kernel_x_given_y:` with `p_y:`).
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Command::Analyze)]
    cmd: Command,
    /// Seed for encoder randomness and instance generation.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = Tolerances::default().prob)]
    tol_prob: f64,
    #[arg(long, default_value_t = Tolerances::default().lp)]
    tol_lp: f64,
    #[arg(long, default_value_t = Tolerances::default().ent)]
    tol_ent: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Number of sweep instances.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Family::DetF)]
    family: Family,
    /// Code file written by `code` and read by `audit`.
    #[arg(long)]
    code: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        input_path: cli.input,
        command: cli.cmd,
        tol: Tolerances {
            prob: cli.tol_prob,
            lp: cli.tol_lp,
            ent: cli.tol_ent,
            ..Tolerances::default()
        },
        seed: cli.seed,
        format: cli.format,
        n: cli.n,
        family: cli.family,
        code_path: cli.code,
    };
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.rendered);
            for v in &outcome.violations {
                eprintln!("invariant violated: {v}");
            }
            if outcome.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
