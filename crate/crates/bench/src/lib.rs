//! Benchmark harness for the sub-dividing genetic method: experiment specs,
//! parallel trial execution, CSV/JSON reports, SVG traces and the
//! `sgm-bench` command line.

pub mod checks;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod report;
pub mod spec;
pub mod svg;

pub use error::{BenchError, Result};
pub use experiment::{run_experiment, run_trials};
pub use report::{Report, SummaryRow, TrialRow};
pub use spec::{Algorithm, ExperimentSpec};
