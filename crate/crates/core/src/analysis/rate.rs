//! Average rate and scheduling gain.
//!
//! `tau = E[ln(1 + SINR)] = int_0^inf P(SINR > e^t - 1) dt`. The coverage
//! mixture is linear in the transform `g`, so the `t` integral moves inside
//! it: the mixture is evaluated once against `G(z) = int_0^inf g(z; e^t - 1) dt`.

use alloc::vec;

use num_complex::Complex64;

use super::coverage::{inner_tol, user_count_weights, GeneralKernel, InterferenceLimitedKernel};
use super::mixture::{binomial_mixture, TransformKernel};
use super::RateResult;
use crate::model::{NetworkConfig, NumericsPolicy};
use crate::numerics::quadrature::{integrate_semi_infinite_with, QuadOptions};
use crate::{Error, Result};

struct RateKernel<F> {
    kernel_at: F,
    rel_tol: f64,
}

impl<F, K> RateKernel<F>
where
    F: Fn(f64) -> K,
    K: TransformKernel,
{
    fn opts(&self) -> QuadOptions {
        QuadOptions::relative(self.rel_tol).with_abs_tol(self.rel_tol * 1e-3)
    }
}

impl<F, K> TransformKernel for RateKernel<F>
where
    F: Fn(f64) -> K,
    K: TransformKernel,
{
    fn real(&self, k: f64) -> Result<f64> {
        let mut failure = None;
        let q = integrate_semi_infinite_with(
            |t: f64| {
                let theta = t.exp_m1();
                if !theta.is_finite() {
                    return 0.0;
                }
                (self.kernel_at)(theta).real(k).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            0.0,
            &self.opts(),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(q?.value)
    }

    fn complex(&self, z: Complex64) -> Result<Complex64> {
        let mut failure = None;
        let q = integrate_semi_infinite_with(
            |t: f64| {
                let theta = t.exp_m1();
                if !theta.is_finite() {
                    return Complex64::new(0.0, 0.0);
                }
                (self.kernel_at)(theta).complex(z).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                })
            },
            0.0,
            &self.opts(),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(q?.value)
    }
}

fn rate_for_weights(cfg: &NetworkConfig, weights: &[f64], numerics: &NumericsPolicy, what: &str) -> Result<RateResult> {
    cfg.validate()?;
    numerics.validate()?;
    let t_tol = inner_tol(numerics);
    let activity = cfg.activity_factor();
    let v = if cfg.is_interference_limited_alpha4() {
        let kernel = RateKernel {
            kernel_at: |theta| InterferenceLimitedKernel { theta, activity },
            rel_tol: t_tol,
        };
        binomial_mixture(weights, &kernel, numerics.quad_rel_tol)
    } else {
        let w_tol = (t_tol * 1e-2).max(1e-13);
        let kernel = RateKernel {
            kernel_at: |theta| GeneralKernel::new(cfg, theta, w_tol),
            rel_tol: t_tol,
        };
        binomial_mixture(weights, &kernel, numerics.quad_rel_tol)
    }
    .map_err(|e| e.within(what))?;
    Ok(RateResult {
        nats_per_hz: v.value.max(0.0),
        truncated_n: weights.len(),
        quad_error: v.error,
    })
}

/// Average rate in nats/Hz of a user whose cell load is averaged over the
/// user-count law and who is served whenever its fading gain is the largest
/// in the cell.
pub fn average_rate_scheduled(cfg: &NetworkConfig, numerics: &NumericsPolicy) -> Result<RateResult> {
    let weights = user_count_weights(cfg.ratio(), numerics)?;
    rate_for_weights(cfg, &weights, numerics, "scheduled average rate")
}

/// Average rate under round-robin scheduling: the served user's fading is a
/// single unit exponential draw. Under [`crate::Scenario::OnlyLoadedBsActive`]
/// the interferer density still depends on the density ratio.
pub fn average_rate_roundrobin(cfg: &NetworkConfig, numerics: &NumericsPolicy) -> Result<RateResult> {
    rate_for_weights(cfg, &[1.0], numerics, "round-robin average rate")
}

/// Average rate when every cell holds exactly `n` other users.
pub fn average_rate_fixed_load(cfg: &NetworkConfig, n: usize, numerics: &NumericsPolicy) -> Result<RateResult> {
    let mut weights = vec![0.0; n + 1];
    weights[n] = 1.0;
    rate_for_weights(cfg, &weights, numerics, "fixed-load average rate")
}

/// `tau_s / tau_r` under the configuration's scenario.
pub fn scheduling_gain(cfg: &NetworkConfig, numerics: &NumericsPolicy) -> Result<f64> {
    let scheduled = average_rate_scheduled(cfg, numerics)?;
    let rr = average_rate_roundrobin(cfg, numerics)?;
    if !(rr.nats_per_hz > 0.0) {
        return Err(Error::numerical(
            "scheduling gain",
            alloc::format!("round-robin rate {} is not positive", rr.nats_per_hz),
            f64::NAN,
        ));
    }
    Ok(scheduled.nats_per_hz / rr.nats_per_hz)
}
