//! Analytical coverage probability, average rate and scheduling gain.
//!
//! Every unconditional result has the same shape: a mixture over the
//! in-cell user count `n` of alternating binomial series
//!
//! ```text
//! S_m = sum_{k=1..m} C(m, k) (-1)^(k+1) g(k),    m = n + 1,
//! ```
//!
//! where `g` is the Laplace transform (in the fading threshold) of the
//! normalized interference-plus-noise. Summed term by term these series
//! cancel catastrophically once `m` passes a few dozen, so [`mixture`]
//! evaluates them as a single contour integral instead.

mod conditional;
mod coverage;
pub(crate) mod mixture;
mod rate;

pub use conditional::{conditional_coverage, conditional_coverage_fixed_interference, interference_laplace};
pub use coverage::{coverage_mode_approximation, coverage_probability, coverage_special_case};
pub use rate::{average_rate_fixed_load, average_rate_roundrobin, average_rate_scheduled, scheduling_gain};

/// Coverage probability with bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    /// `P(SINR > theta)`, clamped to `[0, 1]`.
    pub probability: f64,
    /// Number of user-count terms summed.
    pub truncated_n: usize,
    /// Accumulated quadrature error estimate.
    pub quad_error: f64,
    /// Value before clamping; differs from `probability` only by quadrature
    /// noise.
    pub raw_probability: f64,
}

impl CoverageResult {
    pub(crate) fn from_raw(raw: f64, truncated_n: usize, quad_error: f64) -> Self {
        CoverageResult {
            probability: raw.clamp(0.0, 1.0),
            truncated_n,
            quad_error,
            raw_probability: raw,
        }
    }
}

/// Average spectral efficiency `E[ln(1 + SINR)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub nats_per_hz: f64,
    pub truncated_n: usize,
    pub quad_error: f64,
}
