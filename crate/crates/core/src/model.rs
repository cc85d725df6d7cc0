//! Network model and the distributions the analysis is assembled from.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::Exp1;

use crate::numerics::series::{alternating_binomial_sum, sum_until_tail, DoubleDouble};
use crate::{Error, Result};

/// Shape constant of the cell-size law behind the in-cell user count.
pub const CELL_SHAPE: f64 = 3.5;

/// Which base stations radiate interference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Every base station transmits whether or not it has users.
    AllBsActive,
    /// A base station with an empty cell stays silent.
    OnlyLoadedBsActive,
}

impl Scenario {
    /// Fraction of base stations that transmit, as seen by the analysis.
    ///
    /// For [`Scenario::OnlyLoadedBsActive`] this is the probability that a
    /// typical cell is non-empty, `1 - (1 + ratio/c)^(-c)`.
    pub fn activity_factor(self, ratio: f64) -> f64 {
        match self {
            Scenario::AllBsActive => 1.0,
            Scenario::OnlyLoadedBsActive => {
                -(-CELL_SHAPE * (ratio / CELL_SHAPE).ln_1p()).exp_m1()
            }
        }
    }

    /// 1-based index used on the command line and in CSV output.
    pub fn index(self) -> u8 {
        match self {
            Scenario::AllBsActive => 1,
            Scenario::OnlyLoadedBsActive => 2,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(Scenario::AllBsActive),
            2 => Some(Scenario::OnlyLoadedBsActive),
            _ => None,
        }
    }
}

/// All physical model parameters. Densities are per unit area, powers are
/// linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    pub lambda_b: f64,
    pub lambda_u: f64,
    pub power: f64,
    pub noise: f64,
    pub alpha: f64,
    pub scenario: Scenario,
}

impl NetworkConfig {
    /// Builds and validates a configuration.
    pub fn new(
        lambda_b: f64,
        lambda_u: f64,
        power: f64,
        noise: f64,
        alpha: f64,
        scenario: Scenario,
    ) -> Result<Self> {
        let cfg = NetworkConfig {
            lambda_b,
            lambda_u,
            power,
            noise,
            alpha,
            scenario,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unit BS density, unit power, no noise, `alpha = 4`: the regime where
    /// coverage depends only on the threshold and the density ratio.
    pub fn interference_limited(ratio: f64, scenario: Scenario) -> Result<Self> {
        Self::new(1.0, ratio, 1.0, 0.0, 4.0, scenario)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, name: &str| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive(self.lambda_b, "lambda_b")?;
        positive(self.lambda_u, "lambda_u")?;
        positive(self.power, "power")?;
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::config(format!(
                "noise must be finite and >= 0, got {}",
                self.noise
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(Error::config(format!(
                "path-loss exponent must exceed 2 for finite interference, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// User-to-BS density ratio.
    pub fn ratio(&self) -> f64 {
        self.lambda_u / self.lambda_b
    }

    /// Same network with a different user density ratio.
    pub fn with_ratio(&self, ratio: f64) -> Result<Self> {
        Self::new(
            self.lambda_b,
            ratio * self.lambda_b,
            self.power,
            self.noise,
            self.alpha,
            self.scenario,
        )
    }

    pub fn with_scenario(&self, scenario: Scenario) -> Self {
        NetworkConfig { scenario, ..*self }
    }

    /// True when the closed forms for `alpha = 4` without noise apply.
    pub fn is_interference_limited_alpha4(&self) -> bool {
        self.alpha == 4.0 && self.noise == 0.0
    }

    /// Thinning factor applied to the interference exponent.
    pub fn activity_factor(&self) -> f64 {
        self.scenario.activity_factor(self.ratio())
    }
}

/// Tolerances and truncation rules shared by the analysis and simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsPolicy {
    pub quad_rel_tol: f64,
    pub series_tail_mass: f64,
    pub max_n: usize,
    pub seed: u64,
}

impl Default for NumericsPolicy {
    fn default() -> Self {
        NumericsPolicy {
            quad_rel_tol: 1e-10,
            series_tail_mass: 1e-9,
            max_n: 4096,
            seed: 42,
        }
    }
}

impl NumericsPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_rel_tol > 0.0 && self.quad_rel_tol < 1.0) {
            return Err(Error::config(format!(
                "quad_rel_tol must lie in (0, 1), got {}",
                self.quad_rel_tol
            )));
        }
        if !(self.series_tail_mass > 0.0 && self.series_tail_mass < 1.0) {
            return Err(Error::config(format!(
                "series_tail_mass must lie in (0, 1), got {}",
                self.series_tail_mass
            )));
        }
        if self.max_n < 1 {
            return Err(Error::config("max_n must be at least 1"));
        }
        Ok(())
    }
}

/// A coverage request: linear SINR threshold plus numerics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageQuery {
    pub theta: f64,
    pub numerics: NumericsPolicy,
}

impl CoverageQuery {
    pub fn new(theta: f64, numerics: NumericsPolicy) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::domain(format!(
                "target SINR must be finite and > 0, got {theta}"
            )));
        }
        numerics.validate()?;
        Ok(CoverageQuery { theta, numerics })
    }

    pub fn with_default_numerics(theta: f64) -> Result<Self> {
        Self::new(theta, NumericsPolicy::default())
    }
}

/// Density of the distance from a typical user to its nearest base station,
/// `2 pi lambda r exp(-pi lambda r^2)`.
pub fn distance_pdf(r: f64, lambda_b: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::domain(format!("distance must be >= 0, got {r}")));
    }
    if !(lambda_b > 0.0) {
        return Err(Error::domain(format!("BS density must be > 0, got {lambda_b}")));
    }
    Ok(2.0 * PI * lambda_b * r * (-PI * lambda_b * r * r).exp())
}

/// Law of the number of other users sharing the tagged user's cell.
///
/// The count is negative binomial with shape `c + 1` and odds `ratio / c`,
/// where `c` is [`CELL_SHAPE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserCountLaw {
    ratio: f64,
}

impl UserCountLaw {
    pub const C: f64 = CELL_SHAPE;

    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::domain(format!(
                "density ratio must be finite and > 0, got {ratio}"
            )));
        }
        Ok(UserCountLaw { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Probability that `n` other users share the cell. Evaluated in log
    /// space, so large `n` neither overflows nor underflows prematurely.
    pub fn pmf(&self, n: u64) -> f64 {
        let c = Self::C;
        let odds = self.ratio / c;
        let n = n as f64;
        let log_coeff = libm::lgamma(n + c + 1.0) - libm::lgamma(n + 1.0) - libm::lgamma(c + 1.0);
        let log_p = if n == 0.0 {
            log_coeff - (c + 1.0) * odds.ln_1p()
        } else {
            log_coeff + n * odds.ln() - (n + c + 1.0) * odds.ln_1p()
        };
        log_p.exp()
    }

    pub fn mean(&self) -> f64 {
        (Self::C + 1.0) / Self::C * self.ratio
    }

    /// Pmf values `f(0), f(1), ...` up to the first index at which the
    /// cumulative mass reaches `1 - tail_mass`. The neglected mass is at most
    /// `tail_mass`; the weights are not renormalized.
    pub fn truncated_weights(&self, tail_mass: f64, max_n: usize) -> Result<Vec<f64>> {
        let mut weights = Vec::new();
        sum_until_tail(
            |n| {
                let w = self.pmf(n as u64);
                weights.push(w);
                w
            },
            |_, partial| 1.0 - partial,
            tail_mass,
            max_n + 1,
        )
        .map_err(|e| e.within("user-count series"))?;
        Ok(weights)
    }
}

/// Free-function form of [`UserCountLaw::pmf`].
pub fn user_count_pmf(n: u64, ratio: f64) -> Result<f64> {
    Ok(UserCountLaw::new(ratio)?.pmf(n))
}

/// Cdf of the largest of `n + 1` independent unit-mean exponential gains,
/// `(1 - e^-x)^(n+1)`.
pub fn max_fading_cdf(x: f64, n: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("fading gain must be >= 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok((-(-x).exp_m1()).powi(n as i32 + 1))
}

/// The same cdf through its binomial expansion
/// `sum_k C(n+1, k) (-1)^k e^(-k x)`, accumulated in double-double
/// arithmetic. Only meant for moderate `n`; the expansion is alternating.
pub fn max_fading_cdf_series(x: f64, n: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("fading gain must be >= 0, got {x}")));
    }
    let w = (-x).exp();
    let mut power = DoubleDouble::ONE;
    // k = 0 contributes 1; the helper sums k >= 1 with sign (-1)^(k+1).
    let tail = alternating_binomial_sum(n + 1, |_| {
        power = power * w;
        power
    });
    Ok((DoubleDouble::ONE - tail.sum).to_f64())
}

/// One unit-mean exponential draw.
pub fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

/// Gain of the scheduled user in a cell of `n + 1` users: the largest of
/// `n + 1` independent unit-mean exponential draws.
pub fn sample_max_fading<R: Rng + ?Sized>(n: u32, rng: &mut R) -> f64 {
    let mut best = sample_exp1(rng);
    for _ in 0..n {
        best = best.max(sample_exp1(rng));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate_semi_infinite;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_pdf_values() {
        assert_eq!(distance_pdf(0.0, 2.0).unwrap(), 0.0);
        let v = distance_pdf(1.0, 1.0 / PI).unwrap();
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.7358).abs() < 1e-4);
        assert!(distance_pdf(-1.0, 1.0).is_err());
        assert!(distance_pdf(1.0, 0.0).is_err());
    }

    #[test]
    fn distance_pdf_normalized() {
        for lambda in [0.1, 1.0, 3.0, 10.0] {
            let q = integrate_semi_infinite(|r| distance_pdf(r, lambda).unwrap(), 0.0, 1e-10).unwrap();
            assert!((q.value - 1.0).abs() < 1e-9, "lambda={lambda}: {}", q.value);
        }
    }

    #[test]
    fn pmf_limits_and_errors() {
        assert!((user_count_pmf(0, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!(user_count_pmf(3, 1e-12).unwrap() < 1e-30);
        assert!(user_count_pmf(0, 0.0).is_err());
        assert!(user_count_pmf(0, -1.0).is_err());
        // no overflow far out in the tail
        let far = user_count_pmf(2000, 50.0).unwrap();
        assert!(far.is_finite() && far >= 0.0);
    }

    #[test]
    fn pmf_matches_gamma_ratio_for_small_n() {
        // Direct product form of the gamma ratio for integer n:
        // Gamma(n+c+1)/(Gamma(n+1)Gamma(c+1)) = prod_{j=1..n} (c+j)/j.
        let ratio = 2.5;
        let a = ratio / CELL_SHAPE;
        for n in 0..12u64 {
            let mut coeff = 1.0;
            for j in 1..=n {
                coeff *= (CELL_SHAPE + j as f64) / j as f64;
            }
            let direct = coeff * a.powi(n as i32) / (a + 1.0).powf(n as f64 + CELL_SHAPE + 1.0);
            let got = user_count_pmf(n, ratio).unwrap();
            assert!((got - direct).abs() < 1e-14 * direct.max(1e-300) + 1e-16, "n={n}");
        }
    }

    #[test]
    fn truncated_weights_mass_and_mean() {
        for ratio in [0.5, 1.0, 5.0, 7.0, 10.0, 50.0] {
            let law = UserCountLaw::new(ratio).unwrap();
            let w = law.truncated_weights(1e-12, 4096).unwrap();
            let mass: f64 = w.iter().sum();
            let mean: f64 = w.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
            assert!((mass - 1.0).abs() < 1e-9, "ratio={ratio}");
            assert!((mean - law.mean()).abs() < 1e-6, "ratio={ratio}: {mean}");
        }
        let law = UserCountLaw::new(7.0).unwrap();
        assert!((law.mean() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_respects_cap() {
        let law = UserCountLaw::new(50.0).unwrap();
        assert!(matches!(
            law.truncated_weights(1e-9, 10),
            Err(Error::Numerical { .. })
        ));
    }

    #[test]
    fn max_fading_cdf_values() {
        for n in [0, 1, 5, 40] {
            assert_eq!(max_fading_cdf(0.0, n).unwrap(), 0.0);
            assert_eq!(max_fading_cdf(f64::INFINITY, n).unwrap(), 1.0);
            assert!(max_fading_cdf(50.0, n).unwrap() > 1.0 - 1e-18 * 100.0);
        }
        assert!((max_fading_cdf(core::f64::consts::LN_2, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!(max_fading_cdf(-0.1, 1).is_err());
    }

    #[test]
    fn max_fading_series_matches_product() {
        for n in 0..=30u32 {
            for &x in &[1e-3, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
                let a = max_fading_cdf(x, n).unwrap();
                let b = max_fading_cdf_series(x, n).unwrap();
                assert!((a - b).abs() <= 1e-12, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn exponential_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sample_max_fading(0, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn max_of_five_mean_is_harmonic_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let h5: f64 = (1..=5).map(|k| 1.0 / k as f64).sum();
        let mean: f64 = (0..n).map(|_| sample_max_fading(4, &mut rng)).sum::<f64>() / n as f64;
        assert!((h5 - 2.2833).abs() < 1e-4);
        assert!((mean - h5).abs() < 0.01, "{mean} vs {h5}");
    }

    #[test]
    fn empirical_cdf_at_ln2() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| sample_max_fading(1, &mut rng) <= core::f64::consts::LN_2)
            .count();
        let p = hits as f64 / n as f64;
        assert!((p - 0.25).abs() < 0.005, "{p}");
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(1.0, 1.0, 1.0, 0.0, 2.0, Scenario::AllBsActive).is_err());
        assert!(NetworkConfig::new(0.0, 1.0, 1.0, 0.0, 4.0, Scenario::AllBsActive).is_err());
        assert!(NetworkConfig::new(1.0, 1.0, 1.0, -1.0, 4.0, Scenario::AllBsActive).is_err());
        assert!(NetworkConfig::new(1.0, 1.0, 0.0, 0.0, 4.0, Scenario::AllBsActive).is_err());
        let cfg = NetworkConfig::new(2.0, 10.0, 1.0, 0.0, 4.0, Scenario::AllBsActive).unwrap();
        assert_eq!(cfg.ratio(), 5.0);
        assert!(CoverageQuery::with_default_numerics(0.0).is_err());
    }

    #[test]
    fn activity_factor_limits() {
        let s2 = Scenario::OnlyLoadedBsActive;
        assert_eq!(Scenario::AllBsActive.activity_factor(3.0), 1.0);
        assert!(s2.activity_factor(1e-9) < 1e-8);
        assert!((s2.activity_factor(1e9) - 1.0).abs() < 1e-12);
        let direct = 1.0 - (1.0 + 2.0 / CELL_SHAPE).powf(-CELL_SHAPE);
        assert!((s2.activity_factor(2.0) - direct).abs() < 1e-14);
    }
}
