//! Prior inner/outer bounds over induced acyclic subgraphs, the groups 5/6 outer bound and the
//! four-receiver capacity region.

use super::{fraction, BoundsError, ChannelParams, ConstraintSet, PowerSplit};
use crate::graphs::{induced_acyclic_masks, SideInfoGraph};
use crate::scalar::{cap, Scalar};

/// Prior inner bound: `Σ_{i∈S} R_i ≤ A_min(S)` for every induced acyclic `S`.
pub fn bestknown_inner<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    s: &PowerSplit<T>,
) -> Result<ConstraintSet<T>, BoundsError> {
    p.require_receivers(3)?;
    g.require_receivers(3)?;
    s.validate(3)?;
    Ok(bestknown_inner_rows(&induced_acyclic_masks(g), p, &s.alphas))
}

/// Unchecked row builder behind [`bestknown_inner`].
pub fn bestknown_inner_rows<T: Scalar>(masks: &[u32], p: &ChannelParams<T>, a: &[T]) -> ConstraintSet<T> {
    let pw = p.power();
    let b = [
        cap(a[0] * pw / p.n(1)),
        cap(a[1] * pw / (a[0] * pw + p.n(2))),
        cap(a[2] * pw / ((a[0] + a[1]) * pw + p.n(3))),
    ];
    let tails = [b[0] + b[1] + b[2], b[1] + b[2], b[2]];
    let mut cs = ConstraintSet::new(3);
    for &m in masks {
        cs.push(m, tails[m.trailing_zeros() as usize]);
    }
    cs
}

/// Prior outer bound: `Σ_{i∈S} R_i ≤ C(P/N_min(S))` for every induced acyclic `S`.
pub fn bestknown_outer<T: Scalar>(g: &SideInfoGraph, p: &ChannelParams<T>) -> Result<ConstraintSet<T>, BoundsError> {
    p.require_receivers(g.num_receivers())?;
    let mut cs = ConstraintSet::new(g.num_receivers());
    for m in induced_acyclic_masks(g) {
        cs.push(m, p.single_user(m.trailing_zeros() as usize + 1));
    }
    Ok(cs)
}

/// Outer bound for groups 5 and 6 at power fraction `alpha`.
pub fn groups56_outer<T: Scalar>(group: u8, p: &ChannelParams<T>, alpha: T) -> Result<ConstraintSet<T>, BoundsError> {
    let (i, j, q) = match group {
        5 => (1, 3, 2),
        6 => (2, 3, 1),
        _ => return Err(BoundsError::WrongGroup { op: "groups56_outer", group }),
    };
    p.require_receivers(3)?;
    let alpha = fraction("alpha", alpha)?;
    Ok(groups56_rows(i, j, q, p, alpha))
}

pub(crate) fn groups56_rows<T: Scalar>(i: usize, j: usize, q: usize, p: &ChannelParams<T>, alpha: T) -> ConstraintSet<T> {
    let pw = p.power();
    let mut cs = ConstraintSet::new(3);
    cs.add(&[i], cap(alpha * pw / p.n(i)));
    cs.add(&[j], cap((T::one() - alpha) * pw / (alpha * pw + p.n(j))));
    cs.add(&[q], p.single_user(q));
    cs
}

/// Capacity region of the four-receiver leader at power fraction `alpha`.
pub fn fourrx_capacity<T: Scalar>(p: &ChannelParams<T>, alpha: T) -> Result<ConstraintSet<T>, BoundsError> {
    p.require_receivers(4)?;
    Ok(fourrx_rows(p, fraction("alpha", alpha)?))
}

pub(crate) fn fourrx_rows<T: Scalar>(p: &ChannelParams<T>, alpha: T) -> ConstraintSet<T> {
    let pw = p.power();
    let rest = (T::one() - alpha) * pw;
    let mut cs = ConstraintSet::new(4);
    cs.add(&[1], cap(alpha * pw / p.n(1)));
    cs.add(&[1, 2, 3, 4], p.single_user(1));
    cs.add(&[2, 3, 4], p.single_user(2));
    cs.add(&[3, 4], cap(rest / (alpha * pw + p.n(3))));
    cs.add(&[4], cap(rest / (alpha * pw + p.n(4))));
    cs
}
