//! Side-information graphs, their leader/member decomposition and structural queries.
//!
//! Receivers are numbered from 1 (strongest, smallest noise) to `Q` (weakest).
//! An arc `(i, j)` states that receiver `i` knows message `M_j` a priori.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest receiver count accepted by [`enumerate_all`].
pub const MAX_ENUMERATE_RECEIVERS: usize = 5;

/// Largest receiver count accepted by [`SideInfoGraph::new`].
pub const MAX_RECEIVERS: usize = 16;

/// Errors raised while building or querying side-information graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("at least two receivers are required, got {0}")]
    TooFewReceivers(usize),
    #[error("at most {max} receivers are supported, got {q}")]
    TooManyReceivers { q: usize, max: usize },
    #[error("self-loop on receiver {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} outside 1..={q}")]
    VertexOutOfRange { vertex: usize, q: usize },
    #[error("operation requires exactly {expected} receivers, got {got}")]
    ReceiverCount { expected: usize, got: usize },
    #[error("arc ({0}->{1}) points from a stronger to a weaker receiver")]
    NotLeader(usize, usize),
    #[error("group and member indices must lie in 1..=8, got ({0}, {1})")]
    IndexOutOfRange(u8, u8),
}

/// Directed graph describing which receivers know which messages.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct SideInfoGraph {
    q: usize,
    arcs: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(rename = "Q")]
    q: usize,
    arcs: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for SideInfoGraph {
    type Error = GraphError;

    fn try_from(raw: GraphJson) -> Result<Self, GraphError> {
        SideInfoGraph::new(raw.q, raw.arcs.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<SideInfoGraph> for GraphJson {
    fn from(g: SideInfoGraph) -> Self {
        GraphJson { q: g.q, arcs: g.arcs.iter().map(|&(i, j)| [i, j]).collect() }
    }
}

impl SideInfoGraph {
    /// Builds a validated graph on `q` receivers; duplicate arcs are merged.
    pub fn new<I>(q: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if q < 2 {
            return Err(GraphError::TooFewReceivers(q));
        }
        if q > MAX_RECEIVERS {
            return Err(GraphError::TooManyReceivers { q, max: MAX_RECEIVERS });
        }
        let mut set = BTreeSet::new();
        for (i, j) in arcs {
            for v in [i, j] {
                if v == 0 || v > q {
                    return Err(GraphError::VertexOutOfRange { vertex: v, q });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            set.insert((i, j));
        }
        Ok(SideInfoGraph { q, arcs: set })
    }

    /// Graph on `q` receivers with no side information.
    pub fn empty(q: usize) -> Result<Self, GraphError> {
        Self::new(q, [])
    }

    /// Number of receivers.
    pub fn num_receivers(&self) -> usize {
        self.q
    }

    /// Arc set in lexicographic order.
    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    /// Whether receiver `i` knows message `M_j`.
    pub fn knows(&self, i: usize, j: usize) -> bool {
        self.arcs.contains(&(i, j))
    }

    /// Out-neighbours `O_i`: the messages receiver `i` knows.
    pub fn out_neighbors(&self, i: usize) -> BTreeSet<usize> {
        self.arcs.iter().filter(|a| a.0 == i).map(|a| a.1).collect()
    }

    /// Bit mask of `O_i`, bit `j - 1` set when receiver `i` knows `M_j`.
    pub fn known_mask(&self, i: usize) -> u32 {
        self.arcs.iter().filter(|a| a.0 == i).fold(0, |m, a| m | 1 << (a.1 - 1))
    }

    /// Whether the subgraph induced by the vertices in `mask` has no directed cycle.
    pub fn is_acyclic_on(&self, mask: u32) -> bool {
        let inside = |v: usize| mask >> (v - 1) & 1 == 1;
        let mut indegree = vec![0usize; self.q + 1];
        for &(i, j) in &self.arcs {
            if inside(i) && inside(j) {
                indegree[j] += 1;
            }
        }
        let mut ready: Vec<usize> = (1..=self.q).filter(|&v| inside(v) && indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = ready.pop() {
            seen += 1;
            for &(i, j) in &self.arcs {
                if i == v && inside(j) {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        seen == mask.count_ones() as usize
    }

    /// Graph obtained by renaming every vertex `v` to `perm[v - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.q {
            return Err(GraphError::ReceiverCount { expected: self.q, got: perm.len() });
        }
        Self::new(self.q, self.arcs.iter().map(|&(i, j)| (perm[i - 1], perm[j - 1])))
    }

    /// Arc-wise union of two graphs on the same receivers.
    pub fn union(&self, other: &Self) -> Result<Self, GraphError> {
        if other.q != self.q {
            return Err(GraphError::ReceiverCount { expected: self.q, got: other.q });
        }
        Self::new(self.q, self.arcs.iter().chain(other.arcs.iter()).copied())
    }

    pub(crate) fn require_receivers(&self, expected: usize) -> Result<(), GraphError> {
        if self.q == expected {
            Ok(())
        } else {
            Err(GraphError::ReceiverCount { expected, got: self.q })
        }
    }
}

impl fmt::Display for SideInfoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q={} {{", self.q)?;
        for (k, (i, j)) in self.arcs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}->{j}")?;
        }
        write!(f, "}}")
    }
}

/// Arcs of the leaders `G11..G18`, from weaker to stronger receivers.
pub const LEADER_ARCS: [&[(usize, usize)]; 8] = [
    &[],
    &[(3, 2)],
    &[(2, 1)],
    &[(3, 1)],
    &[(2, 1), (3, 2)],
    &[(2, 1), (3, 1)],
    &[(3, 1), (3, 2)],
    &[(2, 1), (3, 1), (3, 2)],
];

/// Arcs of the member subgraphs `G21..G28`, from stronger to weaker receivers.
pub const MEMBER_ARCS: [&[(usize, usize)]; 8] = [
    &[],
    &[(2, 3)],
    &[(1, 2)],
    &[(1, 3)],
    &[(1, 2), (2, 3)],
    &[(1, 2), (1, 3)],
    &[(1, 3), (2, 3)],
    &[(1, 2), (1, 3), (2, 3)],
];

/// Position of a three-receiver graph in the 8×8 leader/member table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupMember {
    pub group: u8,
    pub member: u8,
}

impl GroupMember {
    /// Validated constructor; both indices lie in `1..=8`.
    pub fn new(group: u8, member: u8) -> Result<Self, GraphError> {
        if (1..=8).contains(&group) && (1..=8).contains(&member) {
            Ok(GroupMember { group, member })
        } else {
            Err(GraphError::IndexOutOfRange(group, member))
        }
    }

    /// Whether the capacity region of this configuration is established.
    pub fn capacity_known(&self) -> bool {
        match self.group {
            1 | 2 | 3 | 5 | 6 | 8 => true,
            7 => matches!(self.member, 2 | 5 | 7 | 8),
            _ => false,
        }
    }
}

impl fmt::Display for GroupMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G1{} ∪ G2{}", self.group, self.member)
    }
}

/// Leader graph `G1i`.
pub fn leader(group: u8) -> Result<SideInfoGraph, GraphError> {
    GroupMember::new(group, 1)?;
    SideInfoGraph::new(3, LEADER_ARCS[group as usize - 1].iter().copied())
}

/// Member subgraph `G2j`.
pub fn member_subgraph(member: u8) -> Result<SideInfoGraph, GraphError> {
    GroupMember::new(1, member)?;
    SideInfoGraph::new(3, MEMBER_ARCS[member as usize - 1].iter().copied())
}

/// Splits a three-receiver graph into its leader and member indices.
pub fn decompose(g: &SideInfoGraph) -> Result<GroupMember, GraphError> {
    g.require_receivers(3)?;
    let pick = |table: &[&[(usize, usize)]; 8], up: bool| {
        let arcs: BTreeSet<_> = g.arcs.iter().copied().filter(|&(i, j)| (i > j) == up).collect();
        let idx = table
            .iter()
            .position(|row| row.len() == arcs.len() && row.iter().all(|a| arcs.contains(a)))
            .expect("tables cover every arc subset");
        idx as u8 + 1
    };
    Ok(GroupMember { group: pick(&LEADER_ARCS, true), member: pick(&MEMBER_ARCS, false) })
}

/// Rebuilds `G1i ∪ G2j`.
pub fn recompose(gm: GroupMember) -> Result<SideInfoGraph, GraphError> {
    leader(gm.group)?.union(&member_subgraph(gm.member)?)
}

/// All nonempty vertex subsets inducing an acyclic subgraph, ordered by size then lexicographically.
pub fn induced_acyclic_subgraphs(g: &SideInfoGraph) -> Vec<Vec<usize>> {
    let mut masks: Vec<u32> = (1..1u32 << g.q).filter(|&m| g.is_acyclic_on(m)).collect();
    let members = |m: u32| (1..=g.q).filter(|&v| m >> (v - 1) & 1 == 1).collect::<Vec<_>>();
    masks.sort_by_key(|&m| (m.count_ones(), members(m)));
    masks.into_iter().map(members).collect()
}

/// Bit masks of the induced acyclic subsets, in the order of [`induced_acyclic_subgraphs`].
pub fn induced_acyclic_masks(g: &SideInfoGraph) -> Vec<u32> {
    induced_acyclic_subgraphs(g)
        .iter()
        .map(|s| s.iter().fold(0, |m, v| m | 1 << (v - 1)))
        .collect()
}

/// Structural condition on a leader under which superposition with multiplexing is conjectured optimal.
///
/// Holds iff whenever receiver `i` knows `M_j`, every receiver `q` with `j < q < i` also knows `M_j`.
pub fn conjecture_condition(leader: &SideInfoGraph) -> Result<bool, GraphError> {
    if let Some(&(i, j)) = leader.arcs.iter().find(|&&(i, j)| i < j) {
        return Err(GraphError::NotLeader(i, j));
    }
    Ok(leader.arcs.iter().all(|&(i, j)| (j + 1..i).all(|q| leader.knows(q, j))))
}

/// Every graph on `q` receivers, ordered by the bit pattern over lexicographically listed arcs.
pub fn enumerate_all(q: usize) -> Result<Vec<SideInfoGraph>, GraphError> {
    if q < 2 {
        return Err(GraphError::TooFewReceivers(q));
    }
    if q > MAX_ENUMERATE_RECEIVERS {
        return Err(GraphError::TooManyReceivers { q, max: MAX_ENUMERATE_RECEIVERS });
    }
    let slots: Vec<(usize, usize)> =
        (1..=q).flat_map(|i| (1..=q).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let total = 1u64 << slots.len();
    let mut out = Vec::with_capacity(total as usize);
    for bits in 0..total {
        let arcs = slots.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &a)| a);
        out.push(SideInfoGraph::new(q, arcs)?);
    }
    Ok(out)
}

/// Four-receiver leader whose capacity region is given by [`crate::bounds::fourrx_capacity`].
///
/// The subcodebooks `[m1, m2]` and `[m2, m3, m4]` of its scheme arise from receiver 2 knowing `M1`,
/// receiver 3 knowing `M2`, and receiver 4 knowing `M2` and `M3`.
pub fn four_receiver_leader() -> SideInfoGraph {
    SideInfoGraph::new(4, [(2, 1), (3, 2), (4, 2), (4, 3)]).expect("static arcs are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(arcs: &[(usize, usize)]) -> SideInfoGraph {
        SideInfoGraph::new(3, arcs.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_bad_arcs() {
        assert_eq!(SideInfoGraph::new(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            SideInfoGraph::new(3, [(4, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 4, q: 3 })
        );
        assert_eq!(SideInfoGraph::new(1, []), Err(GraphError::TooFewReceivers(1)));
    }

    #[test]
    fn out_neighbors_and_dedup() {
        let x = SideInfoGraph::new(3, [(3, 1), (3, 2), (3, 1)]).unwrap();
        assert_eq!(x.arcs().len(), 2);
        assert_eq!(x.out_neighbors(3), BTreeSet::from([1, 2]));
        assert!(x.out_neighbors(1).is_empty());
        assert_eq!(x.known_mask(3), 0b011);
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&g(&[])).unwrap(), GroupMember { group: 1, member: 1 });
        assert_eq!(decompose(&g(&[(3, 2), (2, 3)])).unwrap(), GroupMember { group: 2, member: 2 });
        let full = g(&[(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]);
        assert_eq!(decompose(&full).unwrap(), GroupMember { group: 8, member: 8 });
        assert_eq!(decompose(&g(&[(3, 1)])).unwrap(), GroupMember { group: 4, member: 1 });
    }

    #[test]
    fn member_table_reverses_leader_table() {
        for k in 0..8 {
            let reversed: BTreeSet<_> = LEADER_ARCS[k].iter().map(|&(i, j)| (j, i)).collect();
            let member: BTreeSet<_> = MEMBER_ARCS[k].iter().copied().collect();
            assert_eq!(reversed, member, "index {}", k + 1);
        }
    }

    #[test]
    fn acyclic_subsets_examples() {
        assert_eq!(induced_acyclic_subgraphs(&g(&[])).len(), 7);
        let full = g(&[(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]);
        assert_eq!(induced_acyclic_subgraphs(&full), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(
            induced_acyclic_subgraphs(&g(&[(2, 3), (3, 2)])),
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3]]
        );
    }

    #[test]
    fn conjecture_condition_examples() {
        assert!(conjecture_condition(&leader(1).unwrap()).unwrap());
        assert!(!conjecture_condition(&leader(4).unwrap()).unwrap());
        assert!(conjecture_condition(&leader(6).unwrap()).unwrap());
        assert_eq!(conjecture_condition(&g(&[(1, 2)])), Err(GraphError::NotLeader(1, 2)));
        assert!(conjecture_condition(&four_receiver_leader()).unwrap());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_all(2).unwrap().len(), 4);
        assert_eq!(enumerate_all(3).unwrap().len(), 64);
        assert!(matches!(enumerate_all(6), Err(GraphError::TooManyReceivers { .. })));
    }

    #[test]
    fn json_round_trip() {
        let x: SideInfoGraph = serde_json::from_str(r#"{"Q":3,"arcs":[[3,1],[3,2]]}"#).unwrap();
        assert_eq!(x.out_neighbors(3), BTreeSet::from([1, 2]));
        let back = serde_json::to_string(&x).unwrap();
        assert_eq!(back, r#"{"Q":3,"arcs":[[3,1],[3,2]]}"#);
        assert!(serde_json::from_str::<SideInfoGraph>(r#"{"Q":3,"arcs":[[2,2]]}"#).is_err());
    }
}
