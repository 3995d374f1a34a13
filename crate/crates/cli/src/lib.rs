//! File formats, configuration and subcommands behind the `nightfusion`
//! binary.

pub mod commands;
pub mod config;
pub mod pnm;
pub mod report;
pub mod trace_csv;

pub use commands::{cmd_fuse, cmd_metrics, cmd_query_temp, cmd_simulate, CliError};
pub use config::AppConfig;
