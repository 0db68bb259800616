//! Inner and outer bounds for group 4, the enhanced channel and the coincidence thresholds.

use serde::{Deserialize, Serialize};

use super::{
    capacity_rows, check_group, check_member, fraction, BoundsError, ChannelParams, ConstraintSet, KnownSets,
    PowerSplit, ALL3,
};
use crate::graphs::{decompose, GroupMember, SideInfoGraph};
use crate::scalar::{cap, Scalar};

/// Bisection tolerance on the threshold parameters.
pub const THRESHOLD_TOL: f64 = 1e-10;

/// Iteration cap of the threshold bisection.
pub const THRESHOLD_MAX_ITER: usize = 200;

/// Inner bound of a group-4 member at power fraction `alpha` and splitting fraction `beta`.
pub fn group4_inner<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    alpha: T,
    beta: T,
) -> Result<ConstraintSet<T>, BoundsError> {
    check_group("group4_inner", gm, &[4])?;
    check_member(gm, g)?;
    p.require_receivers(3)?;
    Ok(group4_inner_rows(KnownSets::of(g)?, p, fraction("alpha", alpha)?, fraction("beta", beta)?))
}

/// Unchecked row builder behind [`group4_inner`].
pub fn group4_inner_rows<T: Scalar>(ks: KnownSets, p: &ChannelParams<T>, alpha: T, beta: T) -> ConstraintSet<T> {
    let pw = p.power();
    let one = T::one();
    let top = alpha * beta * pw;
    let mid = (one - alpha) * pw;
    let low = alpha * (one - beta) * pw;
    let split = |k: usize| cap(low / (top + mid + p.n(k))) + cap(top / p.n(k));
    let g2 = cap(mid / (top + p.n(2)));
    let mut cs = ConstraintSet::new(3);
    if matches!(ks.gm.member, 2 | 5) {
        cs.add(&[1], split(1));
        cs.push(ALL3 & !ks.o1, p.single_user(1));
    } else {
        cs.push(0b101 & !ks.o1, split(1));
    }
    cs.add(&[2], g2);
    cs.add(&[3], split(3));
    cs
}

/// First group-4 outer bound at power fraction `alpha`.
pub fn group4_outer1<T: Scalar>(p: &ChannelParams<T>, alpha: T) -> Result<ConstraintSet<T>, BoundsError> {
    p.require_receivers(3)?;
    let alpha = fraction("alpha", alpha)?;
    let pw = p.power();
    let mut cs = ConstraintSet::new(3);
    cs.add(&[1], p.single_user(1));
    cs.add(&[2], cap((T::one() - alpha) * pw / p.n(2)));
    cs.add(&[3], cap(alpha * pw / ((T::one() - alpha) * pw + p.n(3))));
    Ok(cs)
}

/// Channel obtained by lowering `N_3` to `N_2` and swapping the labels of receivers 2 and 3.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedChannel<T> {
    pub graph: SideInfoGraph,
    pub channel: ChannelParams<T>,
    pub member: GroupMember,
}

/// Enhanced channel of a group-4 member; classifies into group 3 or group 5.
pub fn enhanced_channel<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
) -> Result<EnhancedChannel<T>, BoundsError> {
    check_group("enhanced_channel", gm, &[4])?;
    check_member(gm, g)?;
    p.require_receivers(3)?;
    let graph = g.relabel(&[1, 3, 2])?;
    let channel = p.with_noise(vec![p.n(1), p.n(2), p.n(2)])?;
    let member = decompose(&graph)?;
    let expected = if g.knows(2, 3) { 5 } else { 3 };
    if member.group != expected {
        return Err(BoundsError::WrongGroup { op: "enhanced_channel result", group: member.group });
    }
    Ok(EnhancedChannel { graph, channel, member })
}

/// Second group-4 outer bound: the enhanced channel's capacity region on the original rate labels.
pub fn group4_outer2<T: Scalar>(
    gm: GroupMember,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    s: &PowerSplit<T>,
) -> Result<ConstraintSet<T>, BoundsError> {
    let e = enhanced_channel(gm, g, p)?;
    s.validate(2)?;
    Ok(group4_outer2_rows(&e, &s.alphas))
}

/// Unchecked row builder behind [`group4_outer2`].
pub fn group4_outer2_rows<T: Scalar>(e: &EnhancedChannel<T>, a: &[T]) -> ConstraintSet<T> {
    let ks = KnownSets { gm: e.member, o1: e.graph.known_mask(1), o2: e.graph.known_mask(2) };
    capacity_rows(ks, &e.channel, a).permute(&[0, 2, 1])
}

/// Rates of receiver 3 below which the group-4 inner and outer bounds are known to coincide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds<T> {
    pub r_thr3: T,
    pub r_thr3_prime: T,
    /// Root `γ` of the first defining equation, when it was solved.
    pub gamma: Option<T>,
    /// Root `η` of the second defining equation, when it was solved.
    pub eta: Option<T>,
}

/// Threshold pair for a given `R_1` on a three-receiver channel.
pub fn group4_thresholds<T: Scalar>(p: &ChannelParams<T>, r1: T) -> Result<Thresholds<T>, BoundsError> {
    p.require_receivers(3)?;
    let c1 = p.single_user(1);
    let slack = T::of(1e-12) * (T::one() + c1);
    if !(r1 >= T::zero()) || r1 > c1 + slack {
        return Err(BoundsError::RateOutOfRange { value: r1.as_f64(), max: c1.as_f64() });
    }
    let r1 = r1.min(c1);
    let gap = c1 - p.single_user(3);
    if r1 == T::zero() {
        return Ok(Thresholds { r_thr3: T::zero(), r_thr3_prime: T::zero(), gamma: None, eta: None });
    }
    if r1 >= gap {
        let v = c1 - r1;
        return Ok(Thresholds { r_thr3: v, r_thr3_prime: v, gamma: None, eta: None });
    }
    let pw = p.power();
    let (n1, n3) = (p.n(1), p.n(3));
    let gamma = bisect(|x| cap(x * pw / n1) - cap(x * pw / n3) - r1)?;
    let inner = |x: T, n: T| cap(x * pw / ((T::one() - x) * pw + n));
    let eta = bisect(|x| inner(x, n1) - inner(x, n3) - r1)?;
    Ok(Thresholds {
        r_thr3: cap(gamma * pw / n3),
        r_thr3_prime: inner(eta, n3),
        gamma: Some(gamma),
        eta: Some(eta),
    })
}

/// Residual of the first defining equation, `C(γP/N1) − C(γP/N3) − R1`.
pub fn gamma_residual<T: Scalar>(p: &ChannelParams<T>, gamma: T, r1: T) -> T {
    cap(gamma * p.power() / p.n(1)) - cap(gamma * p.power() / p.n(3)) - r1
}

/// Residual of the second defining equation at `η`.
pub fn eta_residual<T: Scalar>(p: &ChannelParams<T>, eta: T, r1: T) -> T {
    let pw = p.power();
    let inner = |n: T| cap(eta * pw / ((T::one() - eta) * pw + n));
    inner(p.n(1)) - inner(p.n(3)) - r1
}

fn bisect<T: Scalar>(f: impl Fn(T) -> T) -> Result<T, BoundsError> {
    let (mut lo, mut hi) = (T::zero(), T::one());
    if !(f(lo) <= T::zero() && f(hi) >= T::zero()) {
        return Err(BoundsError::NonBracketing);
    }
    let tol = T::of(THRESHOLD_TOL);
    for _ in 0..THRESHOLD_MAX_ITER {
        let mid = (lo + hi) / T::of(2.0);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::of(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::recompose;

    fn ch(pw: f64, n: [f64; 3]) -> ChannelParams<f64> {
        ChannelParams::new(pw, n.to_vec()).unwrap()
    }

    fn member(j: u8) -> (GroupMember, SideInfoGraph) {
        let gm = GroupMember::new(4, j).unwrap();
        (gm, recompose(gm).unwrap())
    }

    fn rows(list: &[(&[usize], f64)]) -> ConstraintSet<f64> {
        let mut cs = ConstraintSet::new(3);
        for (r, b) in list {
            cs.add(r, *b);
        }
        cs
    }

    #[test]
    fn inner_plug_in() {
        let (gm, g) = member(1);
        let p = ch(3.0, [1.0, 2.0, 4.0]);
        let cs = group4_inner(gm, &g, &p, 1.0, 1.0).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1, 3], 1.0), (&[2], 0.0), (&[3], cap(0.75))]), 1e-12), "{cs}");
        let cs = group4_inner(gm, &g, &p, 0.0, 0.3).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1, 3], 0.0), (&[2], cap(1.5)), (&[3], 0.0)]), 1e-12), "{cs}");
        let (gm, g) = member(2);
        let cs = group4_inner(gm, &g, &p, 1.0, 1.0).unwrap();
        assert!(cs.rows().iter().any(|c| c.mask == 0b111 && (c.bound - 1.0).abs() < 1e-12));
        assert!(group4_inner(gm, &g, &p, 1.2, 0.5).is_err());
    }

    #[test]
    fn outer1_plug_in() {
        let p = ch(3.0, [1.0, 2.0, 4.0]);
        let cs = group4_outer1(&p, 1.0).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1], 1.0), (&[2], 0.0), (&[3], cap(0.75))]), 1e-12));
        let cs = group4_outer1(&ch(2.0, [1.0, 1.0, 1.0]), 0.5).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1], cap(2.0)), (&[2], 0.5), (&[3], cap(0.5))]), 1e-12));
        assert!(group4_outer1(&p, -0.1).is_err());
    }

    #[test]
    fn enhanced_channel_examples() {
        let p = ch(10.0, [1.0, 2.0, 4.0]);
        let (gm, g) = member(1);
        let e = enhanced_channel(gm, &g, &p).unwrap();
        assert_eq!(e.member, GroupMember::new(3, 1).unwrap());
        assert_eq!(e.channel.noise(), &[1.0, 2.0, 2.0]);
        let (gm, g) = member(2);
        assert_eq!(enhanced_channel(gm, &g, &p).unwrap().member, GroupMember::new(5, 1).unwrap());
        let (gm, g) = member(5);
        assert_eq!(enhanced_channel(gm, &g, &p).unwrap().member.group, 5);
    }

    #[test]
    fn outer2_matches_enhanced_formula() {
        let p = ch(10.0, [1.0, 2.0, 4.0]);
        let (gm, g) = member(1);
        let cs = group4_outer2(gm, &g, &p, &PowerSplit::new(vec![1.0, 0.0])).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1, 3], cap(10.0)), (&[2], 0.0), (&[3], cap(5.0))]), 1e-12), "{cs}");
        let cs = group4_outer2(gm, &g, &p, &PowerSplit::new(vec![0.0, 1.0])).unwrap();
        assert!(cs.approx_eq(&rows(&[(&[1, 3], 0.0), (&[2], cap(5.0)), (&[3], 0.0)]), 1e-12), "{cs}");
    }

    #[test]
    fn thresholds_edge_cases() {
        let p = ch(15.0, [1.0, 2.0, 15.0]);
        let t = group4_thresholds(&p, 0.0).unwrap();
        assert_eq!((t.r_thr3, t.r_thr3_prime), (0.0, 0.0));
        let t = group4_thresholds(&p, p.single_user(1)).unwrap();
        assert_eq!((t.r_thr3, t.r_thr3_prime), (0.0, 0.0));
        assert!(group4_thresholds(&p, 3.0).is_err());
        assert!(group4_thresholds(&p, -0.1).is_err());
    }

    #[test]
    fn thresholds_match_dense_grid_oracle() {
        let p = ch(15.0, [1.0, 2.0, 15.0]);
        let r1 = 0.5;
        let t = group4_thresholds(&p, r1).unwrap();
        let steps = 1_000_000;
        let first = |x: f64| cap(x * 15.0) - cap(x * 15.0 / 15.0);
        let second = |x: f64| cap(x * 15.0 / ((1.0 - x) * 15.0 + 1.0)) - cap(x * 15.0 / ((1.0 - x) * 15.0 + 15.0));
        let root = |f: &dyn Fn(f64) -> f64| {
            (0..=steps).map(|k| k as f64 / steps as f64).find(|&x| f(x) >= r1).unwrap()
        };
        let gamma = root(&first);
        let eta = root(&second);
        assert!((t.gamma.unwrap() - gamma).abs() <= 1e-6);
        assert!((t.eta.unwrap() - eta).abs() <= 1e-6);
        assert!((t.r_thr3 - cap(gamma)).abs() < 1e-6);
        assert!(t.r_thr3 <= t.r_thr3_prime);
        assert!(gamma_residual(&p, t.gamma.unwrap(), r1).abs() < 1e-8);
        assert!(eta_residual(&p, t.eta.unwrap(), r1).abs() < 1e-8);
    }
}
