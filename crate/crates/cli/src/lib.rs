//! Scenario-driven front end for the `fockline` simulators.
//!
//! A scenario file picks one of four experiments (`twc`, `afshar`, `cqed`,
//! `custom-circuit`); [`run`] turns it into a [`RunReport`] of named tables
//! that can be rendered as a terminal table, JSON or CSV.

pub mod commands;
pub mod error;
pub mod output;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use commands::{cmd_afshar, cmd_cqed, cmd_custom, cmd_twc, run};
pub use error::{CliError, Result};
pub use output::{render, Format, Rendered};
pub use report::{Cell, RunReport, Table};
pub use scenario::{load_scenario, parse_scenario, Kind, Scenario};
pub use sweep::{run_sweep, SweepSpec};
