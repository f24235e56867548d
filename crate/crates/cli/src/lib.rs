//! Experiment runner for lclab: named experiments driven by JSON configs,
//! CSV/JSON reports, and the acceptance suite.

pub mod config;
pub mod criteria;
pub mod experiments;
pub mod report;

pub use config::ExperimentConfig;
pub use report::{Assertion, RunReport, Table};

use std::time::Instant;

/// A problem with the invocation rather than with the numbers: unknown
/// experiment, malformed config, bad parameter or unwritable output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Runs `config` and writes its outputs when `config.out` is set.
pub fn run(config: &ExperimentConfig) -> anyhow::Result<RunReport> {
    let start = Instant::now();
    let table = experiments::run_table(config)?;
    let report = RunReport::new(config.clone(), table, start.elapsed().as_secs_f64());
    if let Some(dir) = &config.out {
        report.write(dir)?;
    }
    Ok(report)
}

/// Exit code for an error raised while running.
pub fn error_code(e: &anyhow::Error) -> i32 {
    if e.downcast_ref::<UsageError>().is_some() { EXIT_USAGE } else { EXIT_FAIL }
}
