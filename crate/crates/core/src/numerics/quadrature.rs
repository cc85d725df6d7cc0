//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals and
//! on `[lower, inf)`.
//!
//! The semi-infinite case is mapped onto `[0, 1)` with
//! `u = lower + x / (1 - x)`. The map needs integrands that decay at least
//! like `u^-2`; slower tails leave mass hidden next to `x = 1` that double
//! precision cannot resolve. Integrands may be real or complex.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes plus the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_6,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values the quadrature can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    const ZERO: Self;
    fn norm(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl QuadValue for f64 {
    const ZERO: Self = 0.0;
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    resabs: f64,
}

fn gk15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Segment<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = WGK[7] * fc.norm();
    let mut fv1 = [T::ZERO; 7];
    let mut fv2 = [T::ZERO; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        kronrod = kronrod + sum * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let scale = half.abs();
    let value = kronrod * half;
    resabs *= scale;
    resasc *= scale;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        a,
        b,
        value,
        err,
        resabs,
    }
}

fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult<T>> {
    if !(opts.rel_tol >= 0.0 && opts.abs_tol >= 0.0) || (opts.rel_tol == 0.0 && opts.abs_tol == 0.0) {
        return Err(Error::domain("quadrature needs a positive relative or absolute tolerance"));
    }
    let mut segments: Vec<Segment<T>> = breakpoints
        .windows(2)
        .map(|w| gk15(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * segments.len();
    loop {
        let mut total = T::ZERO;
        let mut err = 0.0;
        let mut resabs = 0.0;
        for s in &segments {
            total = total + s.value;
            err += s.err;
            resabs += s.resabs;
        }
        if !total.is_finite_value() || !err.is_finite() {
            return Err(Error::numerical(
                "adaptive quadrature",
                "integrand produced a non-finite value",
                f64::NAN,
            ));
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        // Below ~100 ulp of the integral of |f| there is nothing left to gain.
        let roundoff_floor = 100.0 * f64::EPSILON * resabs;
        if err <= target || err <= roundoff_floor {
            return Ok(QuadratureResult {
                value: total,
                abs_error_estimate: err,
                evaluations,
            });
        }
        if segments.len() >= opts.max_subdivisions {
            return Err(Error::numerical(
                "adaptive quadrature",
                format!(
                    "error estimate {err:e} above target {target:e} after {} subdivisions",
                    segments.len()
                ),
                total.norm(),
            ));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            return Err(Error::numerical(
                "adaptive quadrature",
                format!("interval [{}, {}] cannot be split further", seg.a, seg.b),
                total.norm(),
            ));
        }
        segments.push(gk15(&mut f, seg.a, mid));
        segments.push(gk15(&mut f, mid, seg.b));
        evaluations += 30;
    }
}

/// Integrates `f` over `[a, b]` with the given options.
pub fn integrate_with<T, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("finite quadrature needs finite limits"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::ZERO,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    adaptive(f, &[a, b], opts)
}

/// Integrates a real `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult> {
    integrate_with(f, a, b, &QuadOptions::relative(rel_tol))
}

/// Integrates `f` over `[lower, inf)` with the given options.
pub fn integrate_semi_infinite_with<T, F>(mut f: F, lower: f64, opts: &QuadOptions) -> Result<QuadratureResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !lower.is_finite() {
        return Err(Error::domain("semi-infinite quadrature needs a finite lower limit"));
    }
    let mapped = |x: f64| {
        let one_minus = 1.0 - x;
        let u = lower + x / one_minus;
        if !u.is_finite() {
            return T::ZERO;
        }
        let fu = f(u);
        if fu.norm() == 0.0 {
            return T::ZERO;
        }
        fu * (1.0 / (one_minus * one_minus))
    };
    // u = lower + {0, 1, 4, 19, inf}
    adaptive(mapped, &[0.0, 0.5, 0.8, 0.95, 1.0], opts)
}

/// Integrates a real `f` over `[lower, inf)` to relative tolerance `rel_tol`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(f: F, lower: f64, rel_tol: f64) -> Result<QuadratureResult> {
    integrate_semi_infinite_with(f, lower, &QuadOptions::relative(rel_tol))
}
