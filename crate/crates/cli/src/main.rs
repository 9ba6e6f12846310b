use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cr_nondeg_cli::corpus::run_corpus;
use cr_nondeg_cli::{run_analyze, run_invariance, AnalyzeOptions, CliError, JobFile};

/// Exact analyzer for finite nondegeneracy of polynomial CR maps between
/// generic submanifolds of complex spaces.
#[derive(Parser)]
#[command(name = "cr-nondeg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a job file: compute dim E_k per order and the verdict.
    ///
    /// Exit code 0 for a nondegenerate map, 2 for degenerate up to the
    /// maximum order, 1 for invalid input.
    Analyze {
        /// Path to a JSON job file.
        job: PathBuf,
        /// Maximum derivative order (overrides the job file and the
        /// CR_NONDEG_MAX_ORDER environment default).
        #[arg(long)]
        max_order: Option<u32>,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Also print the spanning witness multiindices.
        #[arg(long)]
        witnesses: bool,
    },
    /// Run the built-in example corpus against its expected verdicts.
    Corpus {
        #[arg(long)]
        json: bool,
    },
    /// Check the row-space transformation law under seeded random
    /// biholomorphic changes of target coordinates.
    Invariance {
        job: PathBuf,
        /// PRNG seed; recorded in the report.
        #[arg(long)]
        seed: u64,
        /// Number of random coordinate changes to test.
        #[arg(long, default_value_t = 10)]
        trials: u32,
        #[arg(long)]
        max_order: Option<u32>,
        #[arg(long)]
        json: bool,
    },
}

fn input_error(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            job,
            max_order,
            json,
            witnesses,
        } => {
            let job = match JobFile::load(&job) {
                Ok(j) => j,
                Err(e) => return input_error(e),
            };
            let opts = AnalyzeOptions {
                max_order,
                ..AnalyzeOptions::default()
            };
            match run_analyze(&job, &opts) {
                Ok(report) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        print!("{}", report.render_human(witnesses));
                    }
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => input_error(e),
            }
        }
        Command::Corpus { json } => {
            let report = run_corpus();
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report.render_human());
            }
            if report.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Invariance {
            job,
            seed,
            trials,
            max_order,
            json,
        } => {
            let job = match JobFile::load(&job) {
                Ok(j) => j,
                Err(e) => return input_error(e),
            };
            let opts = AnalyzeOptions {
                max_order,
                ..AnalyzeOptions::default()
            };
            match run_invariance(&job, seed, trials, &opts) {
                Ok(report) => {
                    if json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        print!("{}", report.render_human());
                    }
                    if report.all_hold {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => input_error(e),
            }
        }
    }
}
