//! Experiment harness: JSON-configured sweeps over the inequality checks of
//! `wishart-gpi`, CSV/JSON reports, and bundled verification suites.

pub mod config;
pub mod criteria;
pub mod report;
pub mod runner;
pub mod suites;

pub use config::{ConfigError, ExperimentConfig, Plan};
pub use report::{Report, ReportRow};
pub use runner::{run, RunOptions, RunSummary, OUTPUT_DIR_ENV};
pub use suites::{verify_suite, Suite, SuiteSummary};
