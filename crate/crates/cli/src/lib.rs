//! Command-line front end: configuration format, battery runner and report.

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, Battery, ConfigError, RunConfig};
pub use report::Report;
pub use run::{run, RunError};
