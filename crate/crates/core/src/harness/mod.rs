//! Experiment orchestration, the RK4 oracle, configuration and reports.

pub mod cli;
pub mod config;
pub mod criteria;
pub mod experiments;
pub mod oracle;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, ExperimentSection, InitSpec};
pub use criteria::all_criteria;
pub use experiments::{oracle_gate, run_experiment};
pub use oracle::rk4_oracle;
pub use report::{CriterionResult, Report};
