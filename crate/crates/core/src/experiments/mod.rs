//! Named experiment runners assembling the library into end-to-end checks,
//! with deterministic CSV and text reports.

pub mod config;
pub mod radial;
pub mod report;
pub mod runners;

use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, LambdaSpec};
pub use report::{Cell, Format, RunReport, Table, VerdictLine, VERSION};
pub use runners::seeded_test_function;

use crate::error::Result;

/// Validate and run one experiment.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let (tables, verdicts) = runners::dispatch(config)?;
    Ok(RunReport {
        config: config.clone(),
        tables,
        verdicts,
        version: VERSION.to_string(),
        wall_clock: start.elapsed(),
    })
}
