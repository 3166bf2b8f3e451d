//! Configuration-driven scenario runner: one JSON config in, one report out.

mod config;
mod report;
mod scenarios;

pub use config::{ExperimentConfig, Scenario, ThetaMode, SCHEMA_VERSION};
pub use report::{
    emit_report, render_report, write_report, ExperimentReport, ReportFormat, ThetaSource, REPORT_SCHEMA,
};
pub use scenarios::run_scenario;
