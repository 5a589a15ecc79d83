//! Command-line entry point: `run`, `verify`, `moments` and `sample`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpi_harness::config::Instance;
use gpi_harness::{run, verify_suite, ExperimentConfig, RunOptions, Suite};
use serde::Serialize;
use wishart_gpi::wishart::{log_minor_moment_closed, RngStream};

#[derive(Parser)]
#[command(name = "gpi-harness", version, about = "Monte Carlo sweeps for Wishart minor product inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its CSV and JSON reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        /// Evaluate negative powers whose finiteness is not guaranteed.
        #[arg(long)]
        override_finiteness: bool,
    },
    /// Run a verification suite: oracles, proved or conjectures.
    Verify {
        #[arg(long)]
        suite: Suite,
    },
    /// Print the closed-form moment E|X|^ν of a p×p Wishart matrix.
    Moments {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        p: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        /// log|Σ| (0 for Σ = I).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        log_det_sigma: f64,
    },
    /// Emit Wishart draws for every Σ instance of a config as JSON.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        count: usize,
    },
}

#[derive(Serialize)]
struct SampleSet {
    sigma_index: usize,
    sigma_digest: String,
    /// Each draw in row-major order.
    draws: Vec<Vec<f64>>,
}

/// Draws use stream ids disjoint from every `run` row.
const SAMPLE_STREAM_BASE: u64 = 1 << 61;

fn exit(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, workers, override_finiteness } => {
            let config = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit(1);
                }
            };
            let summary = match run(&config, RunOptions { workers, override_finiteness }) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit(1);
                }
            };
            let path = gpi_harness::runner::output_path(&config);
            if let Err(e) = summary.report.write_files(&path) {
                eprintln!("error: writing {}: {e}", path.display());
                return exit(1);
            }
            println!(
                "{} rows -> {} ({} proved violations, {} confirmed violations, {} errors)",
                summary.report.rows.len(),
                path.display(),
                summary.proved_violations,
                summary.confirmed_violations,
                summary.errors
            );
            exit(summary.exit_code())
        }
        Command::Verify { suite } => {
            let summary = verify_suite(suite);
            let failed = summary.results.iter().filter(|r| !r.passed).count();
            println!("suite {suite}: {} criteria, {failed} failed", summary.results.len());
            exit(summary.exit_code())
        }
        Command::Moments { alpha, p, nu, log_det_sigma } => match log_minor_moment_closed(p, alpha, log_det_sigma, nu) {
            Ok(log_m) => {
                println!("log_moment = {log_m:.16e}");
                println!("moment = {:.16e}", log_m.exp());
                exit(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(1)
            }
        },
        Command::Sample { config, count } => {
            let plan = match ExperimentConfig::load(&config).and_then(|c| c.plan()) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit(1);
                }
            };
            let mut sets = Vec::new();
            for (i, instance) in plan.instances.iter().enumerate() {
                let Instance::Wishart(model) = instance else {
                    eprintln!("error: sampling needs a Wishart experiment");
                    return exit(1);
                };
                let stream = RngStream::new(plan.config.seed, SAMPLE_STREAM_BASE | i as u64);
                sets.push(SampleSet {
                    sigma_index: i,
                    sigma_digest: gpi_harness::report::sigma_digest(&plan.sigmas[i]),
                    draws: model.sample_n(&stream, count).iter().map(|x| x.to_row_major()).collect(),
                });
            }
            println!("{}", serde_json::to_string_pretty(&sets).expect("draws serialize"));
            exit(0)
        }
    }
}
