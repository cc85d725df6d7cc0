//! Stable evaluation of user-count mixtures of alternating binomial series.
//!
//! For `g` analytic and bounded on `Re z >= 1/2`, the Nörlund–Rice formula
//! gives, for `m >= 1`,
//!
//! ```text
//! S_m = sum_{k=1..m} C(m,k) (-1)^(k+1) g(k)
//!     = -(1/pi) int_0^inf Re[ g(1/2 + iy) B_m(1/2 + iy) ] dy,
//! B_m(z) = m! / prod_{j=0..m} (j - z).
//! ```
//!
//! The integrand magnitude grows only like `sqrt(m)`, so nothing cancels.
//! Weighted sums over `m` collapse into one integral against
//! `sum_m w_m B_m(z)`, which a two-term recurrence builds in `O(m)`.
//! The single-user term `S_1 = g(1)` is taken directly.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::numerics::quadrature::{integrate_semi_infinite_with, QuadOptions};
use crate::{Error, Result};

/// A Laplace transform `g(s) = E[exp(-s Y)]` of a nonnegative variable,
/// available on the positive axis and on `Re z > 0`.
pub(crate) trait TransformKernel {
    fn real(&self, k: f64) -> Result<f64>;
    fn complex(&self, z: Complex64) -> Result<Complex64>;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MixtureValue {
    pub value: f64,
    pub error: f64,
}

const CONTOUR_RE: f64 = 0.5;

/// `sum_n weights[n] * S_{n+1}` for the transform `kernel`.
pub(crate) fn binomial_mixture<K: TransformKernel>(weights: &[f64], kernel: &K, rel_tol: f64) -> Result<MixtureValue> {
    let mut value = 0.0;
    let mut error = 0.0;
    if let Some(&w0) = weights.first() {
        if w0 != 0.0 {
            value += w0 * kernel.real(1.0)?;
        }
    }
    let higher: Vec<(usize, f64)> = weights
        .iter()
        .copied()
        .enumerate()
        .skip(1)
        .filter(|&(_, w)| w != 0.0)
        .collect();
    if higher.is_empty() {
        return Ok(MixtureValue { value, error });
    }
    let last = higher[higher.len() - 1].0;
    let mut failure: Option<Error> = None;
    let integrand = |y: f64| {
        let z = Complex64::new(CONTOUR_RE, y);
        let mut b = -Complex64::new(1.0, 0.0) / z;
        let mut kern = Complex64::new(0.0, 0.0);
        let mut next = 0;
        for n in 0..=last {
            let m = (n + 1) as f64;
            b = b * m / (m - z);
            if higher[next].0 == n {
                kern += b * higher[next].1;
                next += 1;
            }
        }
        match kernel.complex(z) {
            Ok(g) => (g * kern).re,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let opts = QuadOptions::relative(rel_tol).with_abs_tol(rel_tol * 1e-2);
    let q = integrate_semi_infinite_with(integrand, 0.0, &opts);
    if let Some(e) = failure {
        return Err(e.within("contour integrand"));
    }
    let q = q.map_err(|e| e.within("binomial contour integral"))?;
    value -= q.value / PI;
    error += q.abs_error_estimate / PI;
    Ok(MixtureValue { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::series::{alternating_binomial_sum, DoubleDouble};

    /// `Y ~ Exp(1)`: `g(s) = 1/(1+s)`, `S_m = 1 - 1/(m+1)`.
    struct ExpKernel;

    impl TransformKernel for ExpKernel {
        fn real(&self, k: f64) -> Result<f64> {
            Ok(1.0 / (1.0 + k))
        }
        fn complex(&self, z: Complex64) -> Result<Complex64> {
            Ok(Complex64::new(1.0, 0.0) / (z + 1.0))
        }
    }

    /// `Y ~ Exp(mu)`: `S_m = 1 - Gamma(mu+1) Gamma(m+1) / Gamma(m+mu+1)`.
    struct ScaledExpKernel(f64);

    impl TransformKernel for ScaledExpKernel {
        fn real(&self, k: f64) -> Result<f64> {
            Ok(self.0 / (self.0 + k))
        }
        fn complex(&self, z: Complex64) -> Result<Complex64> {
            Ok(Complex64::new(self.0, 0.0) / (z + self.0))
        }
    }

    fn point_mass(n: usize) -> Vec<f64> {
        let mut w = alloc::vec![0.0; n + 1];
        w[n] = 1.0;
        w
    }

    #[test]
    fn exponential_closed_form() {
        for n in [0usize, 1, 2, 5, 30, 120, 400] {
            let got = binomial_mixture(&point_mass(n), &ExpKernel, 1e-12).unwrap();
            let m = (n + 1) as f64;
            let exact = 1.0 - 1.0 / (m + 1.0);
            assert!((got.value - exact).abs() < 1e-10, "n={n}: {} vs {exact}", got.value);
        }
    }

    #[test]
    fn scaled_exponential_closed_form() {
        for mu in [0.3, 2.5, 10.0] {
            for n in [1usize, 4, 60, 250] {
                let got = binomial_mixture(&point_mass(n), &ScaledExpKernel(mu), 1e-12).unwrap();
                let m = (n + 1) as f64;
                let exact = 1.0 - (libm::lgamma(mu + 1.0) + libm::lgamma(m + 1.0) - libm::lgamma(m + mu + 1.0)).exp();
                assert!((got.value - exact).abs() < 1e-10, "mu={mu} n={n}: {} vs {exact}", got.value);
            }
        }
    }

    #[test]
    fn agrees_with_direct_series_for_small_m() {
        for n in 1..=12usize {
            let got = binomial_mixture(&point_mass(n), &ExpKernel, 1e-12).unwrap();
            let direct = alternating_binomial_sum(n as u32 + 1, |k| DoubleDouble::from(1.0 / (1.0 + f64::from(k))));
            assert!((got.value - direct.sum.to_f64()).abs() < 1e-11, "n={n}");
        }
    }

    #[test]
    fn weighted_mixture_is_linear() {
        let w = [0.2, 0.3, 0.0, 0.5];
        let whole = binomial_mixture(&w, &ExpKernel, 1e-12).unwrap().value;
        let parts: f64 = w
            .iter()
            .enumerate()
            .map(|(n, &wn)| wn * (1.0 - 1.0 / (n as f64 + 2.0)))
            .sum();
        assert!((whole - parts).abs() < 1e-11);
    }
}
