//! Scenario files and CSV output.

pub mod config;
pub mod csv;

pub use config::{emit_config, parse_config, ResolvedConfig};
