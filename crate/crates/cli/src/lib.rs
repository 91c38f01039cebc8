//! Configuration, sweep execution and table output for the `vmfcorr` tool.

pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use config::{parse_config, Format, Mode, ModeConfig, SweepConfig};
pub use error::{CliError, ConfigError};
pub use run::{emit, run, Report, ValidationSummary};
pub use table::{parse_table_json, Cell, Table};
