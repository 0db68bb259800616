//! Ready-made regions for every bound of the toolkit.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::{Domain, Intersection, ParamRegion, Region, RegionError, SearchConfig};
use crate::bounds::capacity::capacity_arity;
use crate::bounds::group7::splits_rates;
use crate::bounds::prior::{fourrx_rows, groups56_rows};
use crate::bounds::{
    bestknown_inner_rows, bestknown_outer, capacity_rows, enhanced_channel, group4_inner_rows, group4_outer1,
    group4_outer2_rows, group7_inner_rows, group7_outer1, jointdecoding_rows, ChannelParams, KnownSets,
};
use crate::graphs::{decompose, four_receiver_leader, induced_acyclic_masks, GroupMember, SideInfoGraph};
use crate::scalar::Scalar;

/// Named bound families exposed to users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSelector {
    Capacity,
    Inner,
    Outer,
    BestknownInner,
    BestknownOuter,
    JointInner,
}

impl BoundSelector {
    /// All selectors in display order.
    pub const ALL: [BoundSelector; 6] = [
        BoundSelector::Capacity,
        BoundSelector::Inner,
        BoundSelector::Outer,
        BoundSelector::BestknownInner,
        BoundSelector::BestknownOuter,
        BoundSelector::JointInner,
    ];

    fn name(&self) -> &'static str {
        match self {
            BoundSelector::Capacity => "capacity",
            BoundSelector::Inner => "inner",
            BoundSelector::Outer => "outer",
            BoundSelector::BestknownInner => "bestknown-inner",
            BoundSelector::BestknownOuter => "bestknown-outer",
            BoundSelector::JointInner => "joint-inner",
        }
    }
}

impl fmt::Display for BoundSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BoundSelector::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown bound `{s}`; expected one of capacity, inner, outer, bestknown-inner, bestknown-outer, joint-inner"))
    }
}

fn three_receiver<T: Scalar>(g: &SideInfoGraph, p: &ChannelParams<T>) -> Result<KnownSets, RegionError> {
    if p.num_receivers() != g.num_receivers() {
        return Err(RegionError::DimensionMismatch { expected: g.num_receivers(), got: p.num_receivers() });
    }
    Ok(KnownSets::of(g)?)
}

fn fraction_domain(k: usize) -> Domain {
    match k {
        0 => Domain::Fixed,
        k => Domain::Simplex(k),
    }
}

/// Capacity region of a configuration whose capacity is established.
pub fn capacity_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<Arc<dyn Region<T>>, RegionError> {
    if g.num_receivers() == 4 && *g == four_receiver_leader() {
        return Ok(Arc::new(fourrx_region(p, search)?));
    }
    let ks = three_receiver(g, p)?;
    match ks.gm.group {
        1 | 2 | 3 | 5 | 6 | 8 => {
            let p = p.clone();
            let region = ParamRegion::new(
                format!("capacity {}", ks.gm),
                3,
                fraction_domain(capacity_arity(ks.gm.group)),
                search,
                move |a: &[T]| capacity_rows(ks, &p, a),
            )?;
            Ok(Arc::new(region))
        }
        7 if ks.gm.capacity_known() => Ok(Arc::new(group7_inner_region(g, p, search)?)),
        _ => Err(RegionError::invalid(BoundSelector::Capacity, ks.gm)),
    }
}

/// Prior inner bound over induced acyclic subgraphs.
pub fn bestknown_inner_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<ParamRegion<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    let masks = induced_acyclic_masks(g);
    let p = p.clone();
    ParamRegion::new(format!("bestknown-inner {}", ks.gm), 3, Domain::Simplex(3), search, move |a: &[T]| {
        bestknown_inner_rows(&masks, &p, a)
    })
}

/// Prior outer bound over induced acyclic subgraphs.
pub fn bestknown_outer_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<ParamRegion<T>, RegionError> {
    let rows = bestknown_outer(g, p)?;
    ParamRegion::new("bestknown-outer", g.num_receivers(), Domain::Fixed, search, move |_: &[T]| rows.clone())
}

/// Inner bound of a group-4 member over `(α, β) ∈ [0, 1]²`.
pub fn group4_inner_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<ParamRegion<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    if ks.gm.group != 4 {
        return Err(RegionError::invalid(BoundSelector::Inner, ks.gm));
    }
    let p = p.clone();
    ParamRegion::new(format!("inner {}", ks.gm), 3, Domain::UnitBox(2), search, move |x: &[T]| {
        group4_inner_rows(ks, &p, x[0], x[1])
    })
}

/// Outer bound of a group-4 member: intersection of the two outer bounds.
pub fn group4_outer_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<Intersection<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    if ks.gm.group != 4 {
        return Err(RegionError::invalid(BoundSelector::Outer, ks.gm));
    }
    let e = enhanced_channel(ks.gm, g, p)?;
    let p1 = p.clone();
    let first = ParamRegion::new("outer-1", 3, Domain::UnitBox(1), search, move |x: &[T]| {
        group4_outer1(&p1, x[0]).expect("fraction inside [0, 1]")
    })?;
    let second = ParamRegion::new("outer-2", 3, Domain::Simplex(2), search, move |a: &[T]| group4_outer2_rows(&e, a))?;
    Intersection::new(format!("outer {}", ks.gm), vec![Arc::new(first), Arc::new(second)])
}

/// Inner bound of a group-7 member over `α ∈ [0, 1]`.
pub fn group7_inner_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<ParamRegion<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    if ks.gm.group != 7 {
        return Err(RegionError::invalid(BoundSelector::Inner, ks.gm));
    }
    let p = p.clone();
    ParamRegion::new(format!("inner {}", ks.gm), 3, Domain::UnitBox(1), search, move |x: &[T]| {
        group7_inner_rows(ks, &p, x[0])
    })
}

/// Outer bound of a group-7 member: first outer bound intersected with the prior outer bound.
pub fn group7_outer_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<Intersection<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    if ks.gm.group != 7 {
        return Err(RegionError::invalid(BoundSelector::Outer, ks.gm));
    }
    let p1 = p.clone();
    let first = ParamRegion::new("outer-1", 3, Domain::UnitBox(1), search, move |x: &[T]| {
        group7_outer1(&p1, x[0]).expect("fraction inside [0, 1]")
    })?;
    let prior = bestknown_outer_region(g, p, search)?;
    Intersection::new(format!("outer {}", ks.gm), vec![Arc::new(first), Arc::new(prior)])
}

/// Outer bound for groups 5 and 6 intersected with the prior outer bound.
pub fn groups56_outer_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<Intersection<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    let (i, j, q) = match ks.gm.group {
        5 => (1, 3, 2),
        6 => (2, 3, 1),
        _ => return Err(RegionError::invalid(BoundSelector::Outer, ks.gm)),
    };
    let p1 = p.clone();
    let first = ParamRegion::new("outer-56", 3, Domain::UnitBox(1), search, move |x: &[T]| {
        groups56_rows(i, j, q, &p1, x[0])
    })?;
    let prior = bestknown_outer_region(g, p, search)?;
    Intersection::new(format!("outer {}", ks.gm), vec![Arc::new(first), Arc::new(prior)])
}

/// Joint-decoding inner bound for group-7 members 1, 3, 4 and 6.
pub fn joint_inner_region<T: Scalar>(
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<ParamRegion<T>, RegionError> {
    let ks = three_receiver(g, p)?;
    if ks.gm.group != 7 || !splits_rates(ks.gm.member) {
        return Err(RegionError::invalid(BoundSelector::JointInner, ks.gm));
    }
    let p = p.clone();
    ParamRegion::new(format!("joint-inner {}", ks.gm), 3, Domain::Simplex(3), search, move |a: &[T]| {
        jointdecoding_rows(ks, &p, a)
    })
}

/// Capacity region of the four-receiver leader over `α ∈ [0, 1]`.
pub fn fourrx_region<T: Scalar>(p: &ChannelParams<T>, search: SearchConfig) -> Result<ParamRegion<T>, RegionError> {
    if p.num_receivers() != 4 {
        return Err(RegionError::DimensionMismatch { expected: 4, got: p.num_receivers() });
    }
    let p = p.clone();
    ParamRegion::new("capacity four-receiver leader", 4, Domain::UnitBox(1), search, move |x: &[T]| {
        fourrx_rows(&p, x[0])
    })
}

/// Region selected by name for a configuration.
pub fn build_region<T: Scalar>(
    selector: BoundSelector,
    g: &SideInfoGraph,
    p: &ChannelParams<T>,
    search: SearchConfig,
) -> Result<Arc<dyn Region<T>>, RegionError> {
    if selector == BoundSelector::BestknownOuter {
        return Ok(Arc::new(bestknown_outer_region(g, p, search)?));
    }
    if g.num_receivers() != 3 {
        let known = g.num_receivers() == 4 && *g == four_receiver_leader();
        return match selector {
            BoundSelector::Capacity | BoundSelector::Inner | BoundSelector::Outer if known => {
                Ok(Arc::new(fourrx_region(p, search)?))
            }
            _ => Err(RegionError::InvalidSelector { selector, target: g.to_string() }),
        };
    }
    let gm: GroupMember = decompose(g).map_err(crate::bounds::BoundsError::from)?;
    match (selector, gm.group) {
        (BoundSelector::Capacity, _) => capacity_region(g, p, search),
        (BoundSelector::Inner, 4) => Ok(Arc::new(group4_inner_region(g, p, search)?)),
        (BoundSelector::Inner, 7) => Ok(Arc::new(group7_inner_region(g, p, search)?)),
        (BoundSelector::Inner, _) => capacity_region(g, p, search),
        (BoundSelector::Outer, 4) => Ok(Arc::new(group4_outer_region(g, p, search)?)),
        (BoundSelector::Outer, 7) => Ok(Arc::new(group7_outer_region(g, p, search)?)),
        (BoundSelector::Outer, 5 | 6) => Ok(Arc::new(groups56_outer_region(g, p, search)?)),
        (BoundSelector::Outer, _) => capacity_region(g, p, search),
        (BoundSelector::BestknownInner, _) => Ok(Arc::new(bestknown_inner_region(g, p, search)?)),
        (BoundSelector::JointInner, _) => Ok(Arc::new(joint_inner_region(g, p, search)?)),
        (BoundSelector::BestknownOuter, _) => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::recompose;

    fn channel() -> ChannelParams<f64> {
        ChannelParams::new(10.0, vec![1.0, 2.0, 4.0]).unwrap()
    }

    fn small() -> SearchConfig {
        SearchConfig::with_grid(64)
    }

    #[test]
    fn selector_names_round_trip() {
        for s in BoundSelector::ALL {
            assert_eq!(s.to_string().parse::<BoundSelector>().unwrap(), s);
        }
        assert!("nope".parse::<BoundSelector>().is_err());
    }

    #[test]
    fn selector_validity() {
        let p = channel();
        let g = |group, member| recompose(GroupMember::new(group, member).unwrap()).unwrap();
        assert!(build_region(BoundSelector::Capacity, &g(4, 1), &p, small()).is_err());
        assert!(build_region(BoundSelector::Capacity, &g(7, 1), &p, small()).is_err());
        assert!(build_region(BoundSelector::Capacity, &g(7, 2), &p, small()).is_ok());
        assert!(build_region(BoundSelector::JointInner, &g(7, 2), &p, small()).is_err());
        assert!(build_region(BoundSelector::JointInner, &g(7, 4), &p, small()).is_ok());
        assert!(build_region(BoundSelector::JointInner, &g(1, 1), &p, small()).is_err());
        for gm in [(1, 1), (4, 3), (5, 2), (6, 6), (7, 6), (8, 8)] {
            for sel in [BoundSelector::Inner, BoundSelector::Outer, BoundSelector::BestknownInner, BoundSelector::BestknownOuter] {
                assert!(build_region(sel, &g(gm.0, gm.1), &p, small()).is_ok(), "{sel} {gm:?}");
            }
        }
        let p4 = ChannelParams::new(10.0, vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(build_region(BoundSelector::Capacity, &four_receiver_leader(), &p4, small()).is_ok());
        let other = SideInfoGraph::empty(4).unwrap();
        assert!(build_region(BoundSelector::Capacity, &other, &p4, small()).is_err());
        assert!(build_region(BoundSelector::BestknownOuter, &other, &p4, small()).is_ok());
    }

    #[test]
    fn group1_equal_noise_membership() {
        let g = SideInfoGraph::empty(3).unwrap();
        let p = ChannelParams::new(1.0, vec![1.0, 1.0, 1.0]).unwrap();
        let r = capacity_region(&g, &p, SearchConfig::default()).unwrap();
        assert!(r.member(&[0.2, 0.2, 0.05], 1e-9).unwrap());
        assert!(r.member(&[0.0, 0.0, 0.0], 0.0).unwrap());
        assert!(!r.member(&[0.2, 0.2, 0.11], 1e-9).unwrap());
    }
}
