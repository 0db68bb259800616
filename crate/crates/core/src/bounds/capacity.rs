//! Capacity regions of groups 1, 2, 3, 5, 6 and 8.

use super::{check_group, check_member, BoundsError, ChannelParams, ConstraintSet, KnownSets, PowerSplit, ALL3};
use crate::graphs::{GroupMember, SideInfoGraph};
use crate::scalar::{cap, Scalar};

/// Number of power fractions used by the capacity-achieving scheme of `group`.
pub(crate) fn capacity_arity(group: u8) -> usize {
    match group {
        1 => 3,
        8 => 0,
        _ => 2,
    }
}

/// Capacity constraints of `g` at the power split `s`.
pub fn capacity_constraints<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    s: &PowerSplit<T>,
) -> Result<ConstraintSet<T>, BoundsError> {
    check_group("capacity_constraints", gm, &[1, 2, 3, 5, 6, 8])?;
    check_member(gm, g)?;
    p.require_receivers(3)?;
    s.validate(capacity_arity(gm.group))?;
    Ok(capacity_rows(KnownSets::of(g)?, p, &s.alphas))
}

/// Unchecked row builder behind [`capacity_constraints`].
pub fn capacity_rows<T: Scalar>(ks: KnownSets, p: &ChannelParams<T>, a: &[T]) -> ConstraintSet<T> {
    let pw = p.power();
    let n = |i| p.n(i);
    let mut cs = ConstraintSet::new(3);
    let not_o1 = ALL3 & !ks.o1;
    let not_o2 = ALL3 & !ks.o2;
    match (ks.gm.group, ks.gm.member) {
        (1, _) => {
            cs.add(&[1], cap(a[0] * pw / n(1)));
            cs.add(&[2], cap(a[1] * pw / (a[0] * pw + n(2))));
            cs.add(&[3], cap(a[2] * pw / ((a[0] + a[1]) * pw + n(3))));
        }
        (2, _) => {
            cs.add(&[1], cap(a[0] * pw / n(1)));
            cs.push(0b110 & not_o2, cap(a[1] * pw / (a[0] * pw + n(2))));
            cs.add(&[3], cap(a[1] * pw / (a[0] * pw + n(3))));
        }
        (3, _) => {
            cs.push(0b011 & not_o1, cap(a[0] * pw / n(1)));
            cs.add(&[2], cap(a[0] * pw / n(2)));
            cs.add(&[3], cap(a[1] * pw / (a[0] * pw + n(3))));
        }
        (5, 2) => {
            cs.add(&[1, 2], p.single_user(1));
            cs.add(&[1, 3], p.single_user(1));
            cs.add(&[1], cap(a[0] * pw / n(1)));
            cs.add(&[2], p.single_user(2));
            cs.add(&[3], cap(a[1] * pw / (a[0] * pw + n(3))));
        }
        (5, _) => {
            cs.push(not_o1, p.single_user(1));
            cs.add(&[1], cap(a[0] * pw / n(1)));
            cs.push(not_o2, p.single_user(2));
            cs.add(&[3], cap(a[1] * pw / (a[0] * pw + n(3))));
        }
        (6, _) => {
            cs.push(not_o1, p.single_user(1));
            cs.add(&[2], cap(a[0] * pw / n(2)));
            cs.add(&[3], cap(a[1] * pw / (a[0] * pw + n(3))));
        }
        (8, 2) => {
            cs.add(&[1, 2], p.single_user(1));
            cs.add(&[1, 3], p.single_user(1));
            cs.add(&[2], p.single_user(2));
            cs.add(&[3], p.single_user(3));
        }
        (8, _) => {
            cs.push(not_o1, p.single_user(1));
            cs.push(not_o2, p.single_user(2));
            cs.add(&[3], p.single_user(3));
        }
        _ => unreachable!("group {} has no capacity row", ks.gm.group),
    }
    cs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{decompose, recompose};

    fn setup(group: u8, member: u8, pw: f64, noise: [f64; 3]) -> (GroupMember, SideInfoGraph, ChannelParams<f64>) {
        let gm = GroupMember::new(group, member).unwrap();
        (gm, recompose(gm).unwrap(), ChannelParams::new(pw, noise.to_vec()).unwrap())
    }

    fn expect(cs: &ConstraintSet<f64>, rows: &[(&[usize], f64)]) {
        let mut want = ConstraintSet::new(3);
        for (r, b) in rows {
            want.add(r, *b);
        }
        assert!(cs.approx_eq(&want, 1e-12), "got {cs}, want {want}");
        assert_eq!(cs.len(), rows.len());
    }

    #[test]
    fn group1_plug_in() {
        let (gm, g, p) = setup(1, 1, 3.0, [1.0, 1.0, 1.0]);
        let cs = capacity_constraints(gm, &g, &p, &PowerSplit::new(vec![1.0, 0.0, 0.0])).unwrap();
        expect(&cs, &[(&[1], 1.0), (&[2], 0.0), (&[3], 0.0)]);
    }

    #[test]
    fn group8_full_side_information() {
        let (gm, g, p) = setup(8, 8, 3.0, [1.0, 1.0, 3.0]);
        let cs = capacity_constraints(gm, &g, &p, &PowerSplit::new(vec![])).unwrap();
        expect(&cs, &[(&[1], 1.0), (&[2], 1.0), (&[3], 0.5)]);
    }

    #[test]
    fn g15_g22_linearized_max() {
        let (gm, g, p) = setup(5, 2, 1.0, [1.0, 1.0, 1.0]);
        let cs = capacity_constraints(gm, &g, &p, &PowerSplit::new(vec![1.0, 0.0])).unwrap();
        expect(&cs, &[(&[1, 2], 0.5), (&[1, 3], 0.5), (&[1], 0.5), (&[2], 0.5), (&[3], 0.0)]);
    }

    #[test]
    fn g12_g22_side_information_removes_rate() {
        let (gm, g, p) = setup(2, 2, 3.0, [1.0, 1.0, 1.0]);
        let cs = capacity_constraints(gm, &g, &p, &PowerSplit::new(vec![0.0, 1.0])).unwrap();
        expect(&cs, &[(&[1], 0.0), (&[2], 1.0), (&[3], 1.0)]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (gm, g, p) = setup(4, 1, 3.0, [1.0, 2.0, 4.0]);
        let s = PowerSplit::new(vec![0.5, 0.5]);
        assert!(matches!(capacity_constraints(gm, &g, &p, &s), Err(BoundsError::WrongGroup { group: 4, .. })));
        let (gm, g, p) = setup(3, 1, 3.0, [1.0, 2.0, 4.0]);
        let s3 = PowerSplit::new(vec![0.2, 0.3, 0.5]);
        assert!(matches!(capacity_constraints(gm, &g, &p, &s3), Err(BoundsError::SplitArity { .. })));
        let other = recompose(GroupMember::new(3, 2).unwrap()).unwrap();
        assert_ne!(decompose(&other).unwrap(), gm);
        assert!(matches!(capacity_constraints(gm, &other, &p, &s), Err(BoundsError::GroupMismatch { .. })));
    }
}
