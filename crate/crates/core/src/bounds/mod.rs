//! Rate-region formulas evaluated as linear constraint sets at concrete parameters.

pub(crate) mod capacity;
pub(crate) mod constraint;
mod group4;
pub(crate) mod group7;
pub(crate) mod prior;

pub use capacity::{capacity_constraints, capacity_rows};
pub use constraint::{Constraint, ConstraintRecord, ConstraintSet};
pub use group4::{
    enhanced_channel, eta_residual, gamma_residual, group4_inner, group4_inner_rows, group4_outer1, group4_outer2,
    group4_outer2_rows, group4_thresholds, EnhancedChannel, Thresholds,
};
pub use group7::{
    group7_inner, group7_inner_rows, group7_outer1, jointdecoding_inner_group7,
    jointdecoding_rows,
};
pub use prior::{
    bestknown_inner, bestknown_inner_rows, bestknown_outer, fourrx_capacity, groups56_outer,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{decompose, GraphError, GroupMember, SideInfoGraph};
use crate::scalar::{cap, Scalar};

/// Errors raised while evaluating bounds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("signal-to-noise ratio must be nonnegative, got {0}")]
    NegativeSnr(f64),
    #[error("invalid channel: {0}")]
    Channel(String),
    #[error("{op} does not apply to group {group}")]
    WrongGroup { op: &'static str, group: u8 },
    #[error("{op} does not apply to {gm}")]
    WrongMember { op: &'static str, gm: GroupMember },
    #[error("group/member {given} does not match the graph, which is {actual}")]
    GroupMismatch { given: GroupMember, actual: GroupMember },
    #[error("power split needs {expected} fractions, got {got}")]
    SplitArity { expected: usize, got: usize },
    #[error("power split {0:?} is not a probability vector")]
    SplitNotSimplex(Vec<f64>),
    #[error("{name} = {value} lies outside [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("rate {value} lies outside [0, {max}]")]
    RateOutOfRange { value: f64, max: f64 },
    #[error("bisection bracket does not change sign")]
    NonBracketing,
    #[error("constraint set: {0}")]
    Constraint(String),
}

/// Shannon capacity `½·log2(1 + t)` with input validation.
pub fn awgn_capacity<T: Scalar>(t: T) -> Result<T, BoundsError> {
    if t < T::zero() || t.is_nan() {
        return Err(BoundsError::NegativeSnr(t.as_f64()));
    }
    Ok(cap(t))
}

/// Transmit power and per-receiver noise variances, strongest receiver first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ChannelJson<T>",
    into = "ChannelJson<T>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct ChannelParams<T> {
    power: T,
    noise: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson<T> {
    #[serde(rename = "P")]
    power: T,
    #[serde(rename = "N")]
    noise: Vec<T>,
}

impl<T: Scalar> TryFrom<ChannelJson<T>> for ChannelParams<T> {
    type Error = BoundsError;

    fn try_from(raw: ChannelJson<T>) -> Result<Self, BoundsError> {
        ChannelParams::new(raw.power, raw.noise)
    }
}

impl<T> From<ChannelParams<T>> for ChannelJson<T> {
    fn from(p: ChannelParams<T>) -> Self {
        ChannelJson { power: p.power, noise: p.noise }
    }
}

impl<T: Scalar> ChannelParams<T> {
    /// Validated constructor: `P ≥ 0`, every noise positive and finite, noises ascending.
    pub fn new(power: T, noise: Vec<T>) -> Result<Self, BoundsError> {
        if !(power >= T::zero()) || !power.is_finite() {
            return Err(BoundsError::Channel(format!("power must be finite and nonnegative, got {power}")));
        }
        if noise.len() < 2 {
            return Err(BoundsError::Channel(format!("need at least two receivers, got {}", noise.len())));
        }
        if let Some(n) = noise.iter().find(|n| !(**n > T::zero()) || !n.is_finite()) {
            return Err(BoundsError::Channel(format!("noise variances must be positive, got {n}")));
        }
        if noise.windows(2).any(|w| w[0] > w[1]) {
            return Err(BoundsError::Channel("noise variances must be ascending".into()));
        }
        Ok(ChannelParams { power, noise })
    }

    /// Transmit power `P`.
    pub fn power(&self) -> T {
        self.power
    }

    /// Noise variances `N_1 ≤ … ≤ N_Q`.
    pub fn noise(&self) -> &[T] {
        &self.noise
    }

    /// Noise variance of receiver `i` (1-based).
    pub fn n(&self, i: usize) -> T {
        self.noise[i - 1]
    }

    /// Number of receivers `Q`.
    pub fn num_receivers(&self) -> usize {
        self.noise.len()
    }

    /// `C(P / N_i)`, the single-user capacity of receiver `i`.
    pub fn single_user(&self, i: usize) -> T {
        cap(self.power / self.n(i))
    }

    /// Copy with a different transmit power.
    pub fn with_power(&self, power: T) -> Result<Self, BoundsError> {
        Self::new(power, self.noise.clone())
    }

    /// Copy with different noise variances.
    pub fn with_noise(&self, noise: Vec<T>) -> Result<Self, BoundsError> {
        Self::new(self.power, noise)
    }

    fn require_receivers(&self, expected: usize) -> Result<(), BoundsError> {
        if self.noise.len() == expected {
            Ok(())
        } else {
            Err(GraphError::ReceiverCount { expected, got: self.noise.len() }.into())
        }
    }
}

/// Power fractions of a superposition scheme, plus the group-4 splitting fraction `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit<T> {
    pub alphas: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<T>,
}

impl<T: Scalar> PowerSplit<T> {
    /// Split over the given fractions without `β`.
    pub fn new(alphas: Vec<T>) -> Self {
        PowerSplit { alphas, beta: None }
    }

    /// Checks the arity and the simplex constraint.
    pub fn validate(&self, expected: usize) -> Result<(), BoundsError> {
        if self.alphas.len() != expected {
            return Err(BoundsError::SplitArity { expected, got: self.alphas.len() });
        }
        let sum = self.alphas.iter().fold(T::zero(), |s, &a| s + a);
        let tol = T::of(1e-12).max(T::epsilon() * T::of(4.0 * expected.max(1) as f64));
        let bad_entry = self.alphas.iter().any(|a| !(*a >= T::zero()) || *a > T::one() + tol);
        if bad_entry || (expected > 0 && (sum - T::one()).abs() > tol) {
            return Err(BoundsError::SplitNotSimplex(self.alphas.iter().map(|a| a.as_f64()).collect()));
        }
        if let Some(b) = self.beta {
            fraction("beta", b)?;
        }
        Ok(())
    }
}

pub(crate) fn fraction<T: Scalar>(name: &'static str, value: T) -> Result<T, BoundsError> {
    if value >= T::zero() && value <= T::one() {
        Ok(value)
    } else {
        Err(BoundsError::FractionOutOfRange { name, value: value.as_f64() })
    }
}

pub(crate) fn check_member(gm: GroupMember, g: &SideInfoGraph) -> Result<(), BoundsError> {
    let actual = decompose(g)?;
    if actual == gm {
        Ok(())
    } else {
        Err(BoundsError::GroupMismatch { given: gm, actual })
    }
}

pub(crate) fn check_group(op: &'static str, gm: GroupMember, groups: &[u8]) -> Result<(), BoundsError> {
    if groups.contains(&gm.group) {
        Ok(())
    } else {
        Err(BoundsError::WrongGroup { op, group: gm.group })
    }
}

/// Receiver-side information needed by the row builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownSets {
    pub gm: GroupMember,
    pub o1: u32,
    pub o2: u32,
}

impl KnownSets {
    /// Reads `O_1`, `O_2` and the group/member pair off a three-receiver graph.
    pub fn of(g: &SideInfoGraph) -> Result<Self, BoundsError> {
        Ok(KnownSets { gm: decompose(g)?, o1: g.known_mask(1), o2: g.known_mask(2) })
    }
}

const ALL3: u32 = 0b111;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_validation() {
        assert_eq!(awgn_capacity(3.0).unwrap(), 1.0);
        assert!(matches!(awgn_capacity(-1.0), Err(BoundsError::NegativeSnr(_))));
    }

    #[test]
    fn channel_validation() {
        assert!(ChannelParams::new(10.0, vec![1.0, 2.0, 4.0]).is_ok());
        assert!(ChannelParams::new(0.0, vec![1.0, 1.0]).is_ok());
        assert!(ChannelParams::new(-1.0, vec![1.0, 2.0]).is_err());
        assert!(ChannelParams::new(1.0, vec![2.0, 1.0]).is_err());
        assert!(ChannelParams::new(1.0, vec![0.0, 1.0]).is_err());
        let p: ChannelParams<f64> = serde_json::from_str(r#"{"P":10.0,"N":[1.0,2.0,4.0]}"#).unwrap();
        assert_eq!(p.noise(), &[1.0, 2.0, 4.0]);
        assert!(serde_json::from_str::<ChannelParams<f64>>(r#"{"P":1,"N":[3,2]}"#).is_err());
    }

    #[test]
    fn split_validation() {
        assert!(PowerSplit::new(vec![0.2, 0.3, 0.5]).validate(3).is_ok());
        assert!(PowerSplit::new(vec![0.2, 0.3]).validate(3).is_err());
        assert!(PowerSplit::new(vec![0.2, 0.3, 0.6]).validate(3).is_err());
        assert!(PowerSplit::new(vec![-0.1, 1.1]).validate(2).is_err());
        assert!(PowerSplit::<f64>::new(vec![]).validate(0).is_ok());
        let s = PowerSplit { alphas: vec![1.0], beta: Some(1.5) };
        assert!(s.validate(1).is_err());
    }
}
