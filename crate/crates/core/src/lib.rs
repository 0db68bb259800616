//! Rate regions, bounds and Monte Carlo scheme validation for the AWGN broadcast channel with
//! receiver message side information.
//!
//! The numeric core is generic over [`Scalar`] (`f32`/`f64`); Fourier–Motzkin elimination is
//! generic over [`Exact`] ordered fields. The aliases below fix the common concrete choices.

pub mod bounds;
pub mod fme;
pub mod graphs;
pub mod regions;
pub mod scalar;
pub mod simulator;

pub use scalar::{cap, Exact, Scalar};

/// Rate in bits per channel use.
pub type Rate = f64;

/// Exact rational used by [`fme`].
pub type Rational = num_rational::BigRational;

/// Channel parameters in double precision.
pub type Channel = bounds::ChannelParams<f64>;

/// Power split in double precision.
pub type Split = bounds::PowerSplit<f64>;

/// Constraint set in double precision.
pub type Constraints = bounds::ConstraintSet<f64>;

/// Linear system over exact rationals.
pub type ExactSystem = fme::LinSystem<Rational>;
