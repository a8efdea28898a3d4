//! Library side of the `sweepdyn` command-line tool: config files, scenario
//! presets, command implementations and the CSV/JSON/SVG writers.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod fsio;
pub mod presets;
pub mod report;
pub mod svg;

pub use error::CliError;
