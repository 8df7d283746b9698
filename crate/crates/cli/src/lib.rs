//! Command-line runner for the chlab laboratory: JSON configurations,
//! simulations, peakon runs, scaling reports, verification suites and
//! parameter sweeps.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, RunConfig};
pub use error::{CliError, Outcome, Result};
pub use run::{run, RunOptions, RunReport};
