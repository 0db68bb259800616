//! Finite sets of 0/1-coefficient rate constraints.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::scalar::Scalar;

/// One inequality `Σ_{i ∈ mask} R_i ≤ bound`; bit `i - 1` of `mask` selects `R_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint<T> {
    pub mask: u32,
    pub bound: T,
}

impl<T: Scalar> Constraint<T> {
    /// Left-hand side `Σ_{i ∈ mask} r_i`.
    #[inline]
    pub fn lhs(&self, r: &[T]) -> T {
        let mut s = T::zero();
        let mut m = self.mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            s = s + r[i];
            m &= m - 1;
        }
        s
    }

    /// Coefficient vector of length `dim`.
    pub fn coef(&self, dim: usize) -> Vec<u8> {
        (0..dim).map(|i| (self.mask >> i & 1) as u8).collect()
    }
}

/// Serialized form of a [`Constraint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRecord<T> {
    pub coef: Vec<u8>,
    pub bound: T,
}

/// Conjunction of rate constraints on a `dim`-receiver rate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<ConstraintRecord<T>>",
    into = "Vec<ConstraintRecord<T>>",
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct ConstraintSet<T> {
    dim: usize,
    rows: Vec<Constraint<T>>,
}

impl<T: Scalar> TryFrom<Vec<ConstraintRecord<T>>> for ConstraintSet<T> {
    type Error = BoundsError;

    fn try_from(records: Vec<ConstraintRecord<T>>) -> Result<Self, BoundsError> {
        let dim = records.first().map_or(0, |r| r.coef.len());
        let mut set = ConstraintSet::new(dim);
        for rec in records {
            if rec.coef.len() != dim || dim > 32 {
                return Err(BoundsError::Constraint("coefficient vectors differ in length".into()));
            }
            let mut mask = 0u32;
            for (i, &c) in rec.coef.iter().enumerate() {
                match c {
                    0 => {}
                    1 => mask |= 1 << i,
                    _ => return Err(BoundsError::Constraint(format!("coefficient {c} is not 0/1"))),
                }
            }
            if mask == 0 {
                return Err(BoundsError::Constraint("zero coefficient vector".into()));
            }
            set.rows.push(Constraint { mask, bound: rec.bound });
        }
        Ok(set)
    }
}

impl<T: Scalar> From<ConstraintSet<T>> for Vec<ConstraintRecord<T>> {
    fn from(set: ConstraintSet<T>) -> Self {
        set.rows.iter().map(|c| ConstraintRecord { coef: c.coef(set.dim), bound: c.bound }).collect()
    }
}

impl<T: Scalar> ConstraintSet<T> {
    /// Empty set (the whole nonnegative orthant) on `dim` rates.
    pub fn new(dim: usize) -> Self {
        ConstraintSet { dim, rows: Vec::new() }
    }

    /// Appends `Σ_{i ∈ mask} R_i ≤ bound`; empty masks are ignored.
    pub fn push(&mut self, mask: u32, bound: T) {
        if mask != 0 {
            self.rows.push(Constraint { mask, bound });
        }
    }

    /// Appends `Σ_{i ∈ receivers} R_i ≤ bound` with 1-based receiver indices.
    pub fn add(&mut self, receivers: &[usize], bound: T) {
        self.push(receivers.iter().fold(0, |m, &i| m | 1 << (i - 1)), bound);
    }

    /// Number of rates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rows in insertion order.
    pub fn rows(&self) -> &[Constraint<T>] {
        &self.rows
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Whether the set has no rows.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Smallest bound per distinct coefficient mask.
    pub fn tightest(&self) -> BTreeMap<u32, T> {
        let mut out = BTreeMap::new();
        for c in &self.rows {
            out.entry(c.mask).and_modify(|b: &mut T| *b = b.min(c.bound)).or_insert(c.bound);
        }
        out
    }

    /// Minimum over rows of `bound − lhs(r)`; `+∞` without rows.
    pub fn slack(&self, r: &[T]) -> T {
        slack_of(&self.rows, r)
    }

    /// Whether every row holds at `r` within `tol`.
    pub fn satisfies(&self, r: &[T], tol: T) -> bool {
        self.rows.iter().all(|c| c.lhs(r) <= c.bound + tol)
    }

    /// Largest `t ≥ 0` with `t·d` satisfying every row; `+∞` when unbounded along `d`.
    pub fn radial(&self, d: &[T]) -> T {
        radial_of(&self.rows, d)
    }

    /// Largest value of rate `axis` keeping the other coordinates of `r`; `None` if infeasible.
    pub fn max_response(&self, r: &[T], axis: usize, tol: T) -> Option<T> {
        response_of(&self.rows, r, axis, tol)
    }

    /// Renames rate `i` to rate `perm[i]` (0-based).
    pub fn permute(&self, perm: &[usize]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|c| {
                let mask = (0..self.dim).filter(|&i| c.mask >> i & 1 == 1).fold(0, |m, i| m | 1 << perm[i]);
                Constraint { mask, bound: c.bound }
            })
            .collect();
        ConstraintSet { dim: self.dim, rows }
    }

    /// Whether both sets describe the same polytope row-for-row after keeping the tightest bounds.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let (a, b) = (self.tightest(), other.tightest());
        self.dim == other.dim
            && a.len() == b.len()
            && a.iter().zip(b.iter()).all(|((ma, ba), (mb, bb))| ma == mb && (*ba - *bb).abs() <= tol)
    }
}

impl<T: Scalar> fmt::Display for ConstraintSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.rows.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            let terms: Vec<String> =
                (0..self.dim).filter(|&i| c.mask >> i & 1 == 1).map(|i| format!("R{}", i + 1)).collect();
            write!(f, "{} <= {}", terms.join("+"), c.bound)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn slack_of<T: Scalar>(rows: &[Constraint<T>], r: &[T]) -> T {
    rows.iter().fold(T::infinity(), |s, c| s.min(c.bound - c.lhs(r)))
}

#[inline]
pub(crate) fn radial_of<T: Scalar>(rows: &[Constraint<T>], d: &[T]) -> T {
    rows.iter().fold(T::infinity(), |t, c| {
        let w = c.lhs(d);
        if w > T::zero() {
            t.min(c.bound.max(T::zero()) / w)
        } else {
            t
        }
    })
}

#[inline]
pub(crate) fn response_of<T: Scalar>(rows: &[Constraint<T>], r: &[T], axis: usize, tol: T) -> Option<T> {
    let bit = 1u32 << axis;
    let mut best = T::infinity();
    for c in rows {
        let rest = c.lhs(r) - if c.mask & bit != 0 { r[axis] } else { T::zero() };
        let room = c.bound - rest;
        if c.mask & bit == 0 {
            if room < -tol {
                return None;
            }
        } else {
            best = best.min(room);
        }
    }
    if best < -tol {
        None
    } else {
        Some(best.max(T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConstraintSet<f64> {
        let mut s = ConstraintSet::new(3);
        s.add(&[1, 3], 1.0);
        s.add(&[2], 0.5);
        s.add(&[3], 0.25);
        s
    }

    #[test]
    fn slack_radial_and_response() {
        let s = sample();
        assert!((s.slack(&[0.5, 0.1, 0.2]) - 0.05).abs() < 1e-15);
        assert!(s.satisfies(&[0.75, 0.5, 0.25], 0.0));
        assert!(!s.satisfies(&[0.8, 0.5, 0.25], 1e-9));
        assert!((s.radial(&[1.0, 1.0, 1.0]) - 0.25).abs() < 1e-15);
        assert_eq!(s.radial(&[0.0, 0.0, 0.0]), f64::INFINITY);
        assert_eq!(s.max_response(&[0.9, 0.0, 0.0], 2, 0.0), Some(0.09999999999999998));
        assert_eq!(s.max_response(&[0.0, 0.6, 0.0], 2, 0.0), None);
        assert_eq!(s.max_response(&[0.0, 0.0, 0.0], 1, 0.0), Some(0.5));
    }

    #[test]
    fn json_shape() {
        let s = sample();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"[{"coef":[1,0,1],"bound":1.0},{"coef":[0,1,0],"bound":0.5},{"coef":[0,0,1],"bound":0.25}]"#);
        let back: ConstraintSet<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<ConstraintSet<f64>>(r#"[{"coef":[2,0],"bound":1}]"#).is_err());
    }

    #[test]
    fn permutation_swaps_rates() {
        let s = sample().permute(&[0, 2, 1]);
        assert_eq!(s.rows()[0].mask, 0b011);
        assert_eq!(s.rows()[1].mask, 0b100);
    }
}
