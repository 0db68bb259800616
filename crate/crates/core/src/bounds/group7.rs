//! Inner and outer bounds for group 7.

use super::{check_group, check_member, fraction, BoundsError, ChannelParams, ConstraintSet, KnownSets, PowerSplit};
use crate::graphs::{GroupMember, SideInfoGraph};
use crate::scalar::{cap, Scalar};

/// Whether a group-7 member uses the rate-splitting family with four constraints.
pub(crate) fn splits_rates(member: u8) -> bool {
    matches!(member, 1 | 3 | 4 | 6)
}

/// Inner bound of a group-7 member at power fraction `alpha`.
pub fn group7_inner<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    alpha: T,
) -> Result<ConstraintSet<T>, BoundsError> {
    check_group("group7_inner", gm, &[7])?;
    check_member(gm, g)?;
    p.require_receivers(3)?;
    Ok(group7_inner_rows(KnownSets::of(g)?, p, fraction("alpha", alpha)?))
}

/// Unchecked row builder behind [`group7_inner`].
pub fn group7_inner_rows<T: Scalar>(ks: KnownSets, p: &ChannelParams<T>, alpha: T) -> ConstraintSet<T> {
    let pw = p.power();
    let x = |k: usize| cap(alpha * pw / p.n(k));
    let y2 = cap((T::one() - alpha) * pw / (alpha * pw + p.n(2)));
    let not_o1 = 0b101 & !ks.o1;
    let mut cs = ConstraintSet::new(3);
    if splits_rates(ks.gm.member) {
        cs.push(0b010 | not_o1, y2 + x(1));
        cs.add(&[2], y2);
        cs.add(&[2, 3], y2 + x(3));
    } else {
        cs.add(&[1], x(1));
        cs.push(not_o1, p.single_user(1));
        cs.add(&[2], y2);
    }
    cs.add(&[3], p.single_user(3));
    cs
}

/// First group-7 outer bound at power fraction `alpha`.
pub fn group7_outer1<T: Scalar>(p: &ChannelParams<T>, alpha: T) -> Result<ConstraintSet<T>, BoundsError> {
    p.require_receivers(3)?;
    let alpha = fraction("alpha", alpha)?;
    let pw = p.power();
    let mut cs = ConstraintSet::new(3);
    cs.add(&[1], cap(alpha * pw / p.n(1)));
    cs.add(&[2], cap((T::one() - alpha) * pw / (alpha * pw + p.n(2))));
    cs.add(&[3], p.single_user(3));
    Ok(cs)
}

/// Inner bound obtained by adding joint decoding to the three-layer superposition scheme.
pub fn jointdecoding_inner_group7<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    s: &PowerSplit<T>,
) -> Result<ConstraintSet<T>, BoundsError> {
    check_group("jointdecoding_inner_group7", gm, &[7])?;
    if !splits_rates(gm.member) {
        return Err(BoundsError::WrongMember { op: "jointdecoding_inner_group7", gm });
    }
    check_member(gm, g)?;
    p.require_receivers(3)?;
    s.validate(3)?;
    Ok(jointdecoding_rows(KnownSets::of(g)?, p, &s.alphas))
}

/// Unchecked row builder behind [`jointdecoding_inner_group7`].
pub fn jointdecoding_rows<T: Scalar>(ks: KnownSets, p: &ChannelParams<T>, a: &[T]) -> ConstraintSet<T> {
    let pw = p.power();
    let b1 = cap(a[0] * pw / p.n(1));
    let b2 = cap(a[1] * pw / (a[0] * pw + p.n(2)));
    let b3p = cap(a[2] * pw / ((a[0] + a[1]) * pw + p.n(2)));
    let mut cs = ConstraintSet::new(3);
    cs.push(0b010 | (0b101 & !ks.o1), b1 + b2 + b3p);
    cs.add(&[2, 3], b2 + b3p);
    cs.add(&[3], cap(a[2] * pw / p.n(3)));
    cs.add(&[3], b3p);
    cs
}
