//! Numeric abstractions shared by every module.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed};

/// Floating-point scalar used for rates, powers and noise variances.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {}

/// Exact ordered field used by Fourier–Motzkin elimination.
pub trait Exact:
    Clone + Num + Signed + Ord + Hash + FromPrimitive + FromStr + Debug + Display + Send + Sync + 'static
{
    /// Lossless conversion to an arbitrary-precision rational.
    fn to_ratio(&self) -> BigRational;
}

impl<I> Exact for Ratio<I>
where
    I: Clone + Integer + Signed + Hash + FromStr + Debug + Display + Send + Sync + 'static + Into<BigInt>,
    Ratio<I>: FromPrimitive,
{
    fn to_ratio(&self) -> BigRational {
        BigRational::new(self.numer().clone().into(), self.denom().clone().into())
    }
}

/// Shannon capacity of a real AWGN channel at signal-to-noise ratio `t`, in bits per channel use.
///
/// Negative arguments produced by rounding are clamped to zero.
pub fn cap<T: Scalar>(t: T) -> T {
    let t = if t > T::zero() { t } else { T::zero() };
    t.ln_1p() / (T::of(2.0) * T::of(std::f64::consts::LN_2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_at_simple_snrs() {
        assert_eq!(cap(0.0_f64), 0.0);
        assert!((cap(1.0_f64) - 0.5).abs() < 1e-15);
        assert!((cap(3.0_f64) - 1.0).abs() < 1e-15);
        assert!((cap(3.0_f32) - 1.0).abs() < 1e-6);
        assert_eq!(cap(-1e-18_f64), 0.0);
    }
}
