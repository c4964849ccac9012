//! Batch driver: run files, subcommands, reports and exit codes.

pub mod config;
pub mod data;
pub mod run;

pub use config::{Config, Section, Value};
pub use run::{exit_code, run, Outcome, Subcommand, REPORT_VERSION};
