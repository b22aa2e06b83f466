//! Scalar abstraction and compensated accumulation.
//!
//! The laboratory mostly computes in `f64`, but the hyperbola-method splitter
//! must also run in exact rational arithmetic (where the splitting identity
//! holds with residual exactly zero). `Scalar` is the minimal num-traits
//! surface both modes share; `CompensatedSum` is a Kahan accumulator that
//! degrades to plain exact addition for exact scalars.

use num_rational::BigRational;
use num_traits::{Num, Zero};

/// Numeric type usable by the generic evaluators: floats (approximate,
/// compensated) or rationals (exact).
pub trait Scalar: Num + Clone + PartialOrd {
    /// True when addition is exact and compensation is unnecessary.
    const EXACT: bool;

    fn from_u64(v: u64) -> Self;
    fn abs_val(&self) -> Self;

    /// Lossy view of the magnitude as f64, used only for reporting
    /// floating-point error budgets (never for the value itself).
    fn approx(&self) -> f64;

    /// One compensated-addition step: returns the new running sum and the
    /// rounding error of this step (always zero for exact scalars).
    fn comp_add(sum: Self, value: Self, compensation: Self) -> (Self, Self) {
        if Self::EXACT {
            (sum + value + compensation, Self::zero())
        } else {
            // Kahan: fold the stored compensation into the incoming value.
            let y = value + compensation;
            let t = sum.clone() + y.clone();
            let c = y - (t.clone() - sum);
            (t, c)
        }
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn from_u64(v: u64) -> Self {
        v as f32
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn approx(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_u64(v: u64) -> Self {
        v as f64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn approx(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn abs_val(&self) -> Self {
        if *self < BigRational::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Kahan-compensated accumulator, generic over the scalar.
///
/// Also tracks the sum of |term| so callers can report a rounding-error
/// bound (`err_bound`) alongside the value; for exact scalars the bound is
/// zero by construction.
#[derive(Debug, Clone)]
pub struct CompensatedSum<S: Scalar> {
    sum: S,
    compensation: S,
    abs_sum: S,
    terms: u64,
}

impl<S: Scalar> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        CompensatedSum {
            sum: S::zero(),
            compensation: S::zero(),
            abs_sum: S::zero(),
            terms: 0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: S) {
        self.abs_sum = self.abs_sum.clone() + value.abs_val();
        let (s, c) = S::comp_add(
            self.sum.clone(),
            value,
            std::mem::replace(&mut self.compensation, S::zero()),
        );
        self.sum = s;
        self.compensation = c;
        self.terms += 1;
    }

    pub fn value(&self) -> S {
        self.sum.clone() + self.compensation.clone()
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }
}

impl CompensatedSum<f64> {
    /// Conservative bound on the accumulated rounding error: compensated
    /// summation keeps the error within a few ulps of the magnitude sum,
    /// independent of the term count.
    pub fn err_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
    }
}

/// Deterministic chunked reduction: walks `lo..=hi` in fixed-size chunks,
/// accumulating `f(n)` per chunk and combining chunk totals in index order.
/// The chunk size is part of the determinism contract: the result is
/// identical no matter how the chunks would be scheduled.
pub fn chunked_sum_f64(lo: u64, hi: u64, chunk: u64, mut f: impl FnMut(u64) -> f64) -> (f64, f64) {
    let chunk = chunk.max(1);
    let mut outer = CompensatedSum::<f64>::new();
    let mut err = 0.0f64;
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(chunk - 1));
        let mut inner = CompensatedSum::<f64>::new();
        for n in start..=end {
            inner.add(f(n));
        }
        err += inner.err_bound();
        outer.add(inner.value());
        if end == u64::MAX {
            break;
        }
        start = end + 1;
    }
    (outer.value(), err + outer.err_bound())
}
