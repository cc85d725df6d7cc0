//! Unconditional coverage probability.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::mixture::{binomial_mixture, TransformKernel};
use super::CoverageResult;
use crate::model::{CoverageQuery, NetworkConfig, NumericsPolicy, Scenario, UserCountLaw};
use crate::numerics::quadrature::{integrate_semi_infinite_with, QuadOptions};
use crate::numerics::rho::{rho, rho_complex};
use crate::{Error, Result};

/// `alpha = 4`, no noise: integrating out the serving distance leaves
/// `g(s) = 1 / (1 + q sqrt(s theta) atan(sqrt(s theta)))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct InterferenceLimitedKernel {
    pub theta: f64,
    pub activity: f64,
}

impl TransformKernel for InterferenceLimitedKernel {
    fn real(&self, k: f64) -> Result<f64> {
        Ok(1.0 / (1.0 + self.activity * rho(k * self.theta, 4.0)?))
    }

    fn complex(&self, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        Ok(one / (one + rho_complex(z * self.theta, 4.0)? * self.activity))
    }
}

/// General path loss and noise. With `w = pi lambda_b r^2`,
///
/// ```text
/// g(s) = int_0^inf exp(-w (1 + q rho(s theta, a)) - s theta (sigma^2/P) (w / (pi lambda_b))^(a/2)) dw
/// ```
#[derive(Debug, Clone, Copy)]
pub(crate) struct GeneralKernel {
    pub theta: f64,
    pub activity: f64,
    pub alpha: f64,
    pub lambda_b: f64,
    pub noise_to_power: f64,
    pub rel_tol: f64,
}

impl GeneralKernel {
    pub fn new(cfg: &NetworkConfig, theta: f64, rel_tol: f64) -> Self {
        GeneralKernel {
            theta,
            activity: cfg.activity_factor(),
            alpha: cfg.alpha,
            lambda_b: cfg.lambda_b,
            noise_to_power: cfg.noise / cfg.power,
            rel_tol,
        }
    }

    fn noise_scale(&self) -> f64 {
        self.theta * self.noise_to_power
    }

    fn opts(&self) -> QuadOptions {
        QuadOptions::relative(self.rel_tol).with_abs_tol(self.rel_tol * 1e-3)
    }

    /// `int_0^inf exp(-decay w - noise (w / (pi lambda_b))^(a/2)) dw`, with
    /// `w` rescaled by `|decay|` so the mass sits near unit argument.
    fn distance_integral(&self, decay: Complex64, noise: Complex64) -> Result<Complex64> {
        let scale = decay.norm();
        let unit = decay / scale;
        let noise = noise * (scale * core::f64::consts::PI * self.lambda_b).powf(-self.alpha / 2.0);
        let has_noise = self.noise_to_power > 0.0;
        let half_alpha = self.alpha / 2.0;
        let q = integrate_semi_infinite_with(
            |u: f64| {
                let mut e = -unit * u;
                if has_noise {
                    e -= noise * u.powf(half_alpha);
                }
                e.exp()
            },
            0.0,
            &self.opts(),
        )?;
        Ok(q.value / scale)
    }
}

impl TransformKernel for GeneralKernel {
    fn real(&self, k: f64) -> Result<f64> {
        let decay = 1.0 + self.activity * rho(k * self.theta, self.alpha)?;
        self.distance_integral(Complex64::new(decay, 0.0), Complex64::new(k * self.noise_scale(), 0.0))
            .map(|v| v.re)
    }

    fn complex(&self, z: Complex64) -> Result<Complex64> {
        let decay = Complex64::new(1.0, 0.0) + rho_complex(z * self.theta, self.alpha)? * self.activity;
        self.distance_integral(decay, z * self.noise_scale())
    }
}

pub(crate) fn inner_tol(numerics: &NumericsPolicy) -> f64 {
    (numerics.quad_rel_tol * 1e-2).max(1e-13)
}

pub(crate) fn user_count_weights(ratio: f64, numerics: &NumericsPolicy) -> Result<Vec<f64>> {
    UserCountLaw::new(ratio)?.truncated_weights(numerics.series_tail_mass, numerics.max_n)
}

fn finish<K: TransformKernel>(weights: &[f64], kernel: &K, numerics: &NumericsPolicy, what: &str) -> Result<CoverageResult> {
    let v = binomial_mixture(weights, kernel, numerics.quad_rel_tol).map_err(|e| e.within(what))?;
    Ok(CoverageResult::from_raw(v.value, weights.len(), v.error))
}

/// Coverage probability for any path-loss exponent and noise level, with the
/// distance integral done by quadrature and the user count summed over its
/// truncated pmf.
pub fn coverage_probability(cfg: &NetworkConfig, query: &CoverageQuery) -> Result<CoverageResult> {
    cfg.validate()?;
    query.numerics.validate()?;
    let weights = user_count_weights(cfg.ratio(), &query.numerics)?;
    let kernel = GeneralKernel::new(cfg, query.theta, inner_tol(&query.numerics));
    finish(&weights, &kernel, &query.numerics, "coverage probability")
}

/// Coverage probability for `alpha = 4` without noise, where it depends only
/// on `theta` and the density ratio:
///
/// ```text
/// sum_n f_N(n) sum_{k=1..n+1} C(n+1,k) (-1)^(k+1) / (1 + q sqrt(k theta) atan(sqrt(k theta)))
/// ```
///
/// `q = 1` for [`Scenario::AllBsActive`].
pub fn coverage_special_case(query: &CoverageQuery, ratio: f64, scenario: Scenario) -> Result<CoverageResult> {
    query.numerics.validate()?;
    let weights = user_count_weights(ratio, &query.numerics)?;
    let kernel = InterferenceLimitedKernel {
        theta: query.theta,
        activity: scenario.activity_factor(ratio),
    };
    finish(&weights, &kernel, &query.numerics, "interference-limited coverage")
}

/// Closed-form approximation that puts all user-count mass on `n = ratio`,
/// which is a mode of the count when the ratio is an integer. Non-integer
/// ratios are rejected.
pub fn coverage_mode_approximation(query: &CoverageQuery, ratio: f64, scenario: Scenario) -> Result<CoverageResult> {
    query.numerics.validate()?;
    if !(ratio >= 1.0 && ratio.fract() == 0.0 && ratio <= u32::MAX as f64) {
        return Err(Error::domain(alloc::format!(
            "mode approximation needs a positive integer density ratio, got {ratio}"
        )));
    }
    let mode = ratio as usize;
    let mut weights = vec![0.0; mode + 1];
    weights[mode] = 1.0;
    let kernel = InterferenceLimitedKernel {
        theta: query.theta,
        activity: scenario.activity_factor(ratio),
    };
    finish(&weights, &kernel, &query.numerics, "mode approximation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::series::{alternating_binomial_sum, DoubleDouble};
    use core::f64::consts::PI;

    fn q(theta: f64) -> CoverageQuery {
        CoverageQuery::with_default_numerics(theta).unwrap()
    }

    /// Term-by-term series in double-double; only trustworthy while
    /// 2^(n+1) * eps stays small.
    fn direct_special(theta: f64, weights: &[f64]) -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let s = alternating_binomial_sum(n as u32 + 1, |k| {
                    let x = (f64::from(k) * theta).sqrt();
                    DoubleDouble::from(1.0 / (1.0 + x * x.atan()))
                });
                w * s.sum.to_f64()
            })
            .sum()
    }

    #[test]
    fn single_user_limit() {
        let v = coverage_special_case(&q(1.0), 1e-9, Scenario::AllBsActive).unwrap();
        assert!((v.probability - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-8);
        assert!((v.probability - 0.5601).abs() < 1e-4);
    }

    #[test]
    fn small_ratio_matches_direct_series() {
        let numerics = NumericsPolicy::default();
        for ratio in [0.3, 1.0] {
            let weights = user_count_weights(ratio, &numerics).unwrap();
            for theta in [0.1, 1.0, 10.0, 100.0] {
                let got = coverage_special_case(&q(theta), ratio, Scenario::AllBsActive).unwrap();
                let direct = direct_special(theta, &weights);
                assert!((got.probability - direct).abs() < 1e-9, "ratio={ratio} theta={theta}");
            }
        }
    }

    #[test]
    fn mode_approximation_two_terms() {
        let v = coverage_mode_approximation(&q(1.0), 1.0, Scenario::AllBsActive).unwrap();
        let hand = 2.0 / (1.0 + PI / 4.0) - 1.0 / (1.0 + 2f64.sqrt() * 2f64.sqrt().atan());
        assert!((v.probability - hand).abs() < 1e-10, "{} vs {hand}", v.probability);
        assert!((v.probability - 0.69485).abs() < 1e-5);
        assert!(coverage_mode_approximation(&q(1.0), 2.5, Scenario::AllBsActive).is_err());
        assert!(coverage_mode_approximation(&q(1.0), 0.0, Scenario::AllBsActive).is_err());
    }

    #[test]
    fn near_zero_threshold() {
        let v = coverage_special_case(&q(1e-10), 10.0, Scenario::AllBsActive).unwrap();
        assert!((v.probability - 1.0).abs() < 1e-4);
        let v = coverage_mode_approximation(&q(1e-10), 4.0, Scenario::AllBsActive).unwrap();
        assert!((v.probability - 1.0).abs() < 1e-4);
    }

    #[test]
    fn general_matches_special() {
        let cfg = NetworkConfig::interference_limited(1.0, Scenario::AllBsActive).unwrap();
        let g = coverage_probability(&cfg, &q(1.0)).unwrap();
        let s = coverage_special_case(&q(1.0), 1.0, Scenario::AllBsActive).unwrap();
        assert!((g.probability - s.probability).abs() < 1e-6);
    }

    #[test]
    fn general_kernel_real_has_closed_form_without_noise() {
        let cfg = NetworkConfig::new(2.0, 6.0, 1.0, 0.0, 3.0, Scenario::AllBsActive).unwrap();
        let k = GeneralKernel::new(&cfg, 2.0, 1e-12);
        let expect = 1.0 / (1.0 + rho(4.0, 3.0).unwrap());
        assert!((k.real(2.0).unwrap() - expect).abs() < 1e-11);
    }
}
