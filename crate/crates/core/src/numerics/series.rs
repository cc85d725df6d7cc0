//! Truncated series and compensated arithmetic.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving roughly 106
/// bits of significand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(hi: f64) -> Self {
        DoubleDouble { hi, lo: 0.0 }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        let (p, e) = two_prod(self.hi, rhs);
        let (hi, lo) = quick_two_sum(p, e + self.lo * rhs);
        DoubleDouble { hi, lo }
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        let q1 = self.hi / rhs;
        let r = self - DoubleDouble::from(rhs) * q1;
        let q2 = r.hi / rhs;
        let r = r - DoubleDouble::from(rhs) * q2;
        let q3 = r.hi / rhs;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Result of an alternating binomial sum.
#[derive(Debug, Clone, Copy)]
pub struct AlternatingSum {
    pub sum: DoubleDouble,
    /// `sum_k C(m, k) |factor(k)|`; the sum's absolute rounding error is
    /// this times the relative error of the factors.
    pub magnitude: f64,
}

/// `sum_{k=1..m} C(m, k) (-1)^(k+1) factor(k)` in double-double arithmetic.
///
/// `factor` is called once for each `k = 1, 2, ..., m` in order. The
/// binomial coefficients are carried in double-double, so the only error
/// left is whatever the caller's factors already contain.
pub fn alternating_binomial_sum<F>(m: u32, mut factor: F) -> AlternatingSum
where
    F: FnMut(u32) -> DoubleDouble,
{
    let mut coeff = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ZERO;
    let mut magnitude = 0.0;
    for k in 1..=m {
        coeff = coeff * f64::from(m - k + 1) / f64::from(k);
        let term = coeff * factor(k);
        magnitude += term.hi.abs();
        if k % 2 == 1 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    AlternatingSum { sum, magnitude }
}

/// Partial sum of a series together with the number of terms used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub terms: usize,
}

/// Adds `term(0), term(1), ...` until `remainder_bound(n, partial)`, an upper
/// bound on everything after index `n`, drops to `tol` or below.
///
/// Fails with [`Error::Numerical`] when `max_terms` terms were not enough.
pub fn sum_until_tail<T, B>(mut term: T, mut remainder_bound: B, tol: f64, max_terms: usize) -> Result<TailSum>
where
    T: FnMut(usize) -> f64,
    B: FnMut(usize, f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::domain("series tolerance must be > 0"));
    }
    let mut acc = CompensatedSum::default();
    let mut last_bound = f64::INFINITY;
    for n in 0..max_terms {
        acc.add(term(n));
        last_bound = remainder_bound(n, acc.value());
        if last_bound <= tol {
            return Ok(TailSum {
                value: acc.value(),
                terms: n + 1,
            });
        }
    }
    Err(Error::numerical(
        "series truncation",
        alloc::format!("remainder bound {last_bound:e} still above {tol:e} after {max_terms} terms"),
        acc.value(),
    ))
}
