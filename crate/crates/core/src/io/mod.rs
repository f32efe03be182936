//! Configuration, tabular artifacts and the command driver.

pub mod config;
pub mod csv;
pub mod run;

pub use config::{parse_config, parse_config_str, NoiseConfig, Overrides, RangeSpec, RunConfig};
pub use csv::{fmt_num, parse_num, write_atomic, CsvTable};
pub use run::{run, Command, RunOutcome};
