//! Coverage conditioned on the serving distance and the in-cell user count.

use core::f64::consts::PI;

use crate::model::{NetworkConfig, Scenario};
use crate::numerics::rho::rho;
use crate::numerics::series::{alternating_binomial_sum, DoubleDouble};
use crate::{Error, Result};

/// Largest tolerated rounding error of a conditional coverage value.
const MAX_SERIES_ERROR: f64 = 1e-6;

/// Laplace transform of the interference at a user whose serving BS lies at
/// distance `r`, evaluated at `k r^alpha theta / P`:
/// `exp(-pi r^2 lambda_b q rho(k theta, alpha))`.
///
/// `area_load` is `r^2 lambda_b`; `q` is the scenario's activity factor at
/// density ratio `ratio`.
pub fn interference_laplace(k_theta: f64, area_load: f64, alpha: f64, scenario: Scenario, ratio: f64) -> Result<f64> {
    if !(area_load >= 0.0) {
        return Err(Error::domain("r^2 lambda_b must be >= 0"));
    }
    if !(ratio > 0.0) {
        return Err(Error::domain("density ratio must be > 0"));
    }
    let q = scenario.activity_factor(ratio);
    Ok((-PI * area_load * q * rho(k_theta, alpha)?).exp())
}

fn check_conditioning(r: f64, theta: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(alloc::format!("serving distance must be > 0, got {r}")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::domain(alloc::format!("target SINR must be > 0, got {theta}")));
    }
    Ok(())
}

/// `P(SINR > theta | R = r, N = n)` for normalized-SNR scheduling under
/// Rayleigh fading:
///
/// ```text
/// sum_{k=1..n+1} C(n+1,k) (-1)^(k+1) exp(-k r^a theta sigma^2 / P) L_I(k r^a theta / P)
/// ```
///
/// summed exactly as written. The series alternates, so large `n` loses
/// precision; when the estimated rounding error exceeds `1e-6` this returns
/// [`Error::Numerical`] instead of a value.
pub fn conditional_coverage(r: f64, n: u32, theta: f64, cfg: &NetworkConfig) -> Result<f64> {
    check_conditioning(r, theta)?;
    cfg.validate()?;
    let path = r.powf(cfg.alpha);
    let noise_exponent = path * theta * cfg.noise / cfg.power;
    let area_load = r * r * cfg.lambda_b;
    let ratio = cfg.ratio();
    let mut failure = None;
    let series = alternating_binomial_sum(n + 1, |k| {
        let k = f64::from(k);
        let laplace = interference_laplace(k * theta, area_load, cfg.alpha, cfg.scenario, ratio).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NAN
        });
        DoubleDouble::from((-k * noise_exponent).exp() * laplace)
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let value = series.sum.to_f64();
    // quadrature-based rho is good to ~1e-13, the closed form to a few ulp
    let factor_rel_err = if cfg.alpha == 4.0 { 8.0 * f64::EPSILON } else { 1e-12 };
    let bound = series.magnitude * factor_rel_err;
    if !(bound <= MAX_SERIES_ERROR) || !value.is_finite() {
        return Err(Error::numerical(
            alloc::format!("conditional coverage (n = {n})"),
            alloc::format!("alternating series rounding bound {bound:e} exceeds {MAX_SERIES_ERROR:e}"),
            value,
        ));
    }
    Ok(value)
}

/// The same alternating series when the interference is a known constant
/// `interference`. Every factor is then a power of `w = exp(-x)` with
/// `x = r^a theta (sigma^2 + I) / P`, and the powers and coefficients are
/// carried in double-double, so the sum is accurate for moderate `n`.
pub fn conditional_coverage_fixed_interference(
    r: f64,
    n: u32,
    theta: f64,
    interference: f64,
    cfg: &NetworkConfig,
) -> Result<f64> {
    check_conditioning(r, theta)?;
    if !(interference >= 0.0 && interference.is_finite()) {
        return Err(Error::domain("interference must be finite and >= 0"));
    }
    let x = r.powf(cfg.alpha) * theta * (cfg.noise + interference) / cfg.power;
    let w = (-x).exp();
    let mut power = DoubleDouble::ONE;
    let series = alternating_binomial_sum(n + 1, |_| {
        power = power * w;
        power
    });
    Ok(series.sum.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::max_fading_cdf;

    fn cfg(noise: f64, alpha: f64, scenario: Scenario) -> NetworkConfig {
        NetworkConfig::new(1.0, 5.0, 1.0, noise, alpha, scenario).unwrap()
    }

    #[test]
    fn laplace_values() {
        let v = interference_laplace(1.0, 1.0 / PI, 4.0, Scenario::AllBsActive, 1.0).unwrap();
        assert!((v - (-PI / 4.0).exp()).abs() < 1e-15);
        assert!((v - 0.4559).abs() < 1e-4);
        let tiny = interference_laplace(1e-14, 3.0, 4.0, Scenario::AllBsActive, 1.0).unwrap();
        assert!((tiny - 1.0).abs() < 1e-12);
        let s1 = interference_laplace(2.0, 0.4, 3.0, Scenario::AllBsActive, 1e9).unwrap();
        let s2 = interference_laplace(2.0, 0.4, 3.0, Scenario::OnlyLoadedBsActive, 1e9).unwrap();
        assert!((s1 - s2).abs() < 1e-12);
    }

    #[test]
    fn single_user_is_one_term() {
        let c = cfg(0.1, 4.0, Scenario::AllBsActive);
        let (r, theta) = (0.7, 2.0);
        let got = conditional_coverage(r, 0, theta, &c).unwrap();
        let expect = (-r.powi(4) * theta * 0.1).exp()
            * interference_laplace(theta, r * r, 4.0, Scenario::AllBsActive, 5.0).unwrap();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn vanishing_threshold_gives_certain_coverage() {
        let c = cfg(0.5, 3.5, Scenario::OnlyLoadedBsActive);
        for n in [0, 1, 4, 10] {
            let v = conditional_coverage(0.9, n, 1e-12, &c).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn fixed_interference_matches_order_statistic() {
        let c = cfg(0.2, 4.0, Scenario::AllBsActive);
        let (r, theta, i0): (f64, f64, f64) = (0.6, 1.5, 0.8);
        let x = r.powf(4.0) * theta * (0.2 + i0) / 1.0;
        let got = conditional_coverage_fixed_interference(r, 2, theta, i0, &c).unwrap();
        let direct = 1.0 - (1.0 - (-x).exp()).powi(3);
        assert!((got - direct).abs() < 1e-14);
        assert!((got - (1.0 - max_fading_cdf(x, 2).unwrap())).abs() < 1e-14);
    }

    #[test]
    fn large_n_is_refused_not_garbage() {
        let c = cfg(0.0, 4.0, Scenario::AllBsActive);
        match conditional_coverage(0.5, 120, 1.0, &c) {
            Err(Error::Numerical { .. }) => {}
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }

    #[test]
    fn more_users_more_coverage() {
        let c = cfg(0.05, 4.0, Scenario::AllBsActive);
        let vals: alloc::vec::Vec<f64> = (0..15).map(|n| conditional_coverage(0.8, n, 1.0, &c).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{vals:?}");
    }
}
