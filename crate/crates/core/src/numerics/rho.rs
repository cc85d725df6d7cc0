//! The interference exponent
//!
//! ```text
//! rho(s, alpha) = s^(2/alpha) * int_{s^(-2/alpha)}^inf du / (1 + u^(alpha/2))
//! ```
//!
//! so that the Laplace transform of Rayleigh-faded PPP interference seen by
//! a user at distance `r` from its serving BS is `exp(-pi r^2 lambda rho)`.
//!
//! Substituting `u = s^(-2/alpha) t^(-2/(alpha-2))` turns the tail integral
//! into the bounded form
//!
//! ```text
//! rho(s, alpha) = 2 s / (alpha - 2) * int_0^1 dt / (1 + s t^(alpha/(alpha-2)))
//! ```
//!
//! which is what the quadrature path evaluates. It also continues
//! analytically to complex `s` off the cut `(-inf, -1]`.

use num_complex::Complex64;

use super::quadrature::{integrate_with, QuadOptions};
use crate::{Error, Result};

const RHO_REL_TOL: f64 = 1e-13;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 2.0 {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!(
            "rho needs a path-loss exponent > 2, got {alpha}"
        )))
    }
}

/// `rho(s, alpha)` for real `s >= 0`. Uses `sqrt(s) atan(sqrt(s))` when
/// `alpha == 4`.
pub fn rho(s: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(s >= 0.0) {
        return Err(Error::domain(alloc::format!("rho needs s >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if alpha == 4.0 {
        let root = s.sqrt();
        return Ok(root * root.atan());
    }
    rho_quadrature(s, alpha)
}

/// `rho(s, alpha)` by quadrature for any `alpha > 2`, never taking the
/// closed-form shortcut.
pub fn rho_quadrature(s: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::domain(alloc::format!("rho needs finite s >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let p = alpha / (alpha - 2.0);
    let scale = 2.0 * s / (alpha - 2.0);
    let opts = QuadOptions::relative(RHO_REL_TOL);
    let knee = s.powf(-1.0 / p);
    let integrand = |t: f64| 1.0 / (1.0 + s * t.powf(p));
    let value = if knee < 1.0 {
        integrate_with(integrand, 0.0, knee, &opts)?.value + integrate_with(integrand, knee, 1.0, &opts)?.value
    } else {
        integrate_with(integrand, 0.0, 1.0, &opts)?.value
    };
    Ok(scale * value)
}

/// Analytic continuation of `rho` to complex `s` with `Re s > 0` (more
/// generally, `s` off `(-inf, -1]`).
pub fn rho_complex(s: Complex64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if s == Complex64::new(0.0, 0.0) {
        return Ok(s);
    }
    if s.im == 0.0 && s.re <= -1.0 {
        return Err(Error::domain("rho is singular on (-inf, -1]"));
    }
    if alpha == 4.0 {
        let root = s.sqrt();
        return Ok(root * root.atan());
    }
    let p = alpha / (alpha - 2.0);
    let scale = s * (2.0 / (alpha - 2.0));
    let opts = QuadOptions::relative(RHO_REL_TOL);
    let knee = s.norm().powf(-1.0 / p);
    let integrand = |t: f64| Complex64::new(1.0, 0.0) / (s * t.powf(p) + 1.0);
    let value = if knee < 1.0 {
        integrate_with(integrand, 0.0, knee, &opts)?.value + integrate_with(integrand, knee, 1.0, &opts)?.value
    } else {
        integrate_with(integrand, 0.0, 1.0, &opts)?.value
    };
    Ok(scale * value)
}
