//! Coverage probability, average rate and scheduling gain of normalized-SNR
//! scheduling in downlink cellular networks whose base stations and users
//! form independent Poisson point processes.
//!
//! The crate is `no_std` and only needs `alloc`. It has four parts:
//!
//! * [`model`]: network configuration and the three probability laws the
//!   analysis is built from (serving distance, in-cell user count, and the
//!   fading of the scheduled user).
//! * [`numerics`]: adaptive Gauss–Kronrod quadrature, the interference
//!   exponent `rho`, and truncated series helpers.
//! * [`analysis`]: conditional and unconditional coverage, rates and the
//!   scheduling gain.
//! * [`montecarlo`]: a spatial simulator of the same model, used as an
//!   independent oracle for every analytical result.
//!
//! File formats, parallel trial dispatch and the command line live in the
//! `schedgeo` companion crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
pub use model::{CoverageQuery, NetworkConfig, NumericsPolicy, Scenario, UserCountLaw};
