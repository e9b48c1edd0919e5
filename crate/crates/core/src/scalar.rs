//! Floating point abstraction shared by every numeric kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the models are evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Natural log of `n!`, by direct summation below 256 and Stirling's series above.
pub fn ln_factorial<S: Scalar>(n: u32) -> S {
    if n < 2 {
        return S::zero();
    }
    if n < 256 {
        return (2..=n).map(|k| S::from_count(k as usize).ln()).sum();
    }
    let x = S::from_count(n as usize) + S::one();
    // ln Γ(x) via Stirling with three correction terms; error < 1e-15 for x > 256.
    let half = S::lit(0.5);
    let inv = S::one() / x;
    let inv2 = inv * inv;
    (x - half) * x.ln() - x
        + half * (S::lit(2.0) * S::PI()).ln()
        + inv * (S::lit(1.0 / 12.0) - inv2 * (S::lit(1.0 / 360.0) - inv2 * S::lit(1.0 / 1260.0)))
}

/// `ln(Σ exp(x_i))` without overflow. Returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<S: Scalar>(xs: &[S]) -> S {
    let max = xs.iter().copied().fold(S::neg_infinity(), S::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<S>().ln()
}
