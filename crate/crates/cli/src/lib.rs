//! Command-line front end for `schedgeo-core`: configuration files,
//! parameter sweeps written as CSV, parallel Monte Carlo runs and the
//! validation suite.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod runner;

pub use error::{CliError, CliResult};
