//! Command-line front end for `fblec`: single-scenario reports, parameter
//! sweeps and the standard figure data, all written as plain text or CSV.

// `!(x > 0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod sweep;
pub mod table;

pub use commands::{compensate_report, ec_report, Report, Scheme};
pub use config::Scenario;
pub use error::{CliError, Result};
pub use figures::{render, Figure, FigureOptions};
pub use sweep::{SweepAxis, SweepSpec};
pub use table::Table;
