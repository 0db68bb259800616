//! Transmission schemes: superposed subcodebooks carrying multiplexed or XOR-combined messages,
//! and per-receiver decoding schedules.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::graphs::{decompose, GroupMember, SideInfoGraph};

/// Fraction of a split message's bits carried by its first part.
pub const DEFAULT_SPLIT: f64 = 0.5;

/// Reference to message `M_msg` (`part = 0`) or to part 1 or 2 of a split message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartRef {
    pub msg: usize,
    pub part: u8,
}

impl PartRef {
    /// The whole message `M_msg`.
    pub fn whole(msg: usize) -> Self {
        PartRef { msg, part: 0 }
    }

    /// Part `part` of the split message `M_msg`.
    pub fn split(msg: usize, part: u8) -> Self {
        PartRef { msg, part }
    }
}

impl fmt::Display for PartRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.part {
            0 => write!(f, "m{}", self.msg),
            p => write!(f, "m{}{}", self.msg, p),
        }
    }
}

/// One multiplexed field of a subcodebook payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Part(PartRef),
    /// Zero-padded bitwise XOR of the operands.
    Xor(Vec<PartRef>),
}

impl Component {
    pub(crate) fn parts(&self) -> Vec<PartRef> {
        match self {
            Component::Part(p) => vec![*p],
            Component::Xor(ps) => ps.clone(),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Part(p) => write!(f, "{p}"),
            Component::Xor(ps) => {
                let names: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", names.join("⊕"))
            }
        }
    }
}

/// Gaussian subcodebook with power `alpha·P` indexed by the concatenation of its payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub alpha: f64,
    pub payload: Vec<Component>,
}

/// One decoding step: the layers decoded together and the layers treated as noise.
///
/// Layers in neither set must already be determined and are subtracted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub decode: Vec<usize>,
    pub noise: Vec<usize>,
}

/// Superposition scheme with a decoding schedule per receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub side_info: SideInfoGraph,
    /// Per message, the bit fraction of part 1 when the message is split.
    pub splits: Vec<Option<f64>>,
    pub layers: Vec<Layer>,
    /// `decoders[i]` is the schedule of receiver `i + 1`.
    pub decoders: Vec<Vec<Step>>,
}

impl SchemeSpec {
    /// Number of receivers.
    pub fn receivers(&self) -> usize {
        self.side_info.num_receivers()
    }

    /// Message parts in canonical order.
    pub fn parts(&self) -> Vec<PartRef> {
        (1..=self.receivers())
            .flat_map(|m| match self.splits.get(m - 1).copied().flatten() {
                Some(_) => vec![PartRef::split(m, 1), PartRef::split(m, 2)],
                None => vec![PartRef::whole(m)],
            })
            .collect()
    }

    /// Bits of each part in [`SchemeSpec::parts`] order for message sizes `bits`.
    pub fn part_bits(&self, bits: &[u32]) -> Vec<u32> {
        self.parts()
            .iter()
            .map(|p| {
                let b = bits[p.msg - 1];
                let first = self.splits[p.msg - 1].map_or(b, |s| (b as f64 * s).round() as u32);
                match p.part {
                    0 | 1 => first.min(b),
                    _ => b - first.min(b),
                }
            })
            .collect()
    }

    /// Replaces the power fractions.
    pub fn with_alphas(mut self, alphas: &[f64]) -> Result<Self, SimError> {
        if alphas.len() != self.layers.len() {
            return Err(SimError::Scheme(format!("{} power fractions for {} layers", alphas.len(), self.layers.len())));
        }
        for (l, &a) in self.layers.iter_mut().zip(alphas) {
            l.alpha = a;
        }
        self.validate()?;
        Ok(self)
    }

    /// Replaces the split fraction of message `msg`, which must already be split.
    pub fn with_split(mut self, msg: usize, fraction: f64) -> Result<Self, SimError> {
        match self.splits.get_mut(msg.wrapping_sub(1)) {
            Some(Some(s)) if (0.0..=1.0).contains(&fraction) => *s = fraction,
            _ => return Err(SimError::Scheme(format!("message {msg} is not split or fraction {fraction} is invalid"))),
        }
        Ok(self)
    }

    /// Checks power fractions, payload references and decoder schedules.
    pub fn validate(&self) -> Result<(), SimError> {
        let q = self.receivers();
        let bad = |m: String| Err(SimError::Scheme(m));
        if self.splits.len() != q || self.decoders.len() != q {
            return bad(format!("{q} receivers need {q} split entries and {q} decoders"));
        }
        if self.splits.iter().flatten().any(|s| !(0.0..=1.0).contains(s)) {
            return bad("split fractions must lie in [0, 1]".into());
        }
        if self.layers.iter().any(|l| !(l.alpha >= 0.0 && l.alpha <= 1.0)) {
            return bad("power fractions must lie in [0, 1]".into());
        }
        let sum: f64 = self.layers.iter().map(|l| l.alpha).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return bad(format!("power fractions sum to {sum}, not 1"));
        }
        let parts: BTreeSet<PartRef> = self.parts().into_iter().collect();
        let mut used = BTreeSet::new();
        for (k, l) in self.layers.iter().enumerate() {
            for c in &l.payload {
                if let Component::Xor(ops) = c {
                    if ops.len() < 2 {
                        return bad(format!("layer {} has an XOR with fewer than two operands", k + 1));
                    }
                }
                for p in c.parts() {
                    if !parts.contains(&p) {
                        return bad(format!("layer {} references undefined part {p}", k + 1));
                    }
                    used.insert(p.msg);
                }
            }
        }
        if let Some(m) = (1..=q).find(|m| !used.contains(m)) {
            return bad(format!("message {m} is carried by no layer"));
        }
        for (r, steps) in self.decoders.iter().enumerate() {
            for (s, step) in steps.iter().enumerate() {
                let all = step.decode.iter().chain(&step.noise);
                if let Some(l) = all.clone().find(|&&l| l >= self.layers.len()) {
                    return bad(format!("receiver {} step {} references undefined layer {}", r + 1, s + 1, l + 1));
                }
                if step.decode.iter().any(|l| step.noise.contains(l)) {
                    return bad(format!("receiver {} step {} decodes a layer it treats as noise", r + 1, s + 1));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.layers.len() == 1;
        for (k, l) in self.layers.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let fields: Vec<String> = l.payload.iter().map(|c| c.to_string()).collect();
            let body = if fields.len() == 1 { fields[0].clone() } else { format!("[{}]", fields.join(",")) };
            if single {
                write!(f, "x({body})")?;
            } else {
                write!(f, "x{}({body})", k + 1)?;
            }
        }
        Ok(())
    }
}

fn m(i: usize) -> Component {
    Component::Part(PartRef::whole(i))
}

fn s(i: usize, k: u8) -> Component {
    Component::Part(PartRef::split(i, k))
}

fn xor(a: PartRef, b: PartRef) -> Component {
    Component::Xor(vec![a, b])
}

/// Schedule from successive decode sets; everything not yet decoded is noise.
fn schedule(sets: &[&[usize]], layers: usize) -> Vec<Step> {
    let mut done: Vec<usize> = Vec::new();
    sets.iter()
        .map(|set| {
            done.extend_from_slice(set);
            Step { decode: set.to_vec(), noise: (0..layers).filter(|l| !done.contains(l)).collect() }
        })
        .collect()
}

/// Capacity-achieving or best inner-bound scheme of a three-receiver configuration.
///
/// Power fractions default to an even split and split messages to [`DEFAULT_SPLIT`]; adjust them
/// with [`SchemeSpec::with_alphas`] and [`SchemeSpec::with_split`].
pub fn scheme_for(gm: GroupMember, g: &SideInfoGraph) -> Result<SchemeSpec, SimError> {
    let actual = decompose(g)?;
    if actual != gm {
        return Err(SimError::Scheme(format!("graph is {actual}, not {gm}")));
    }
    let w = PartRef::whole;
    let sp = PartRef::split;
    let mut splits = vec![None; 3];
    let (payloads, sets): (Vec<Vec<Component>>, [&[&[usize]]; 3]) = match (gm.group, gm.member) {
        (1, _) => (vec![vec![m(1)], vec![m(2)], vec![m(3)]], [&[&[2], &[1], &[0]], &[&[2], &[1]], &[&[2]]]),
        (2, 2) => (vec![vec![m(1)], vec![xor(w(2), w(3))]], [&[&[1], &[0]], &[&[1]], &[&[1]]]),
        (2, _) => (vec![vec![m(1)], vec![m(2), m(3)]], [&[&[1], &[0]], &[&[1]], &[&[1]]]),
        (3, _) => (vec![vec![m(1), m(2)], vec![m(3)]], [&[&[1], &[0]], &[&[1], &[0]], &[&[1]]]),
        (4, _) => return Err(SimError::Unsupported(4)),
        (5, 2) => (vec![vec![m(1), xor(w(2), w(3))], vec![xor(w(2), w(3))]], [&[&[0, 1]], &[&[0, 1]], &[&[1]]]),
        (5, _) => (vec![vec![m(1), m(2)], vec![m(2), m(3)]], [&[&[0, 1]], &[&[0, 1]], &[&[1]]]),
        (6, _) => (vec![vec![m(1), m(2)], vec![m(1), m(3)]], [&[&[0, 1]], &[&[1], &[0]], &[&[1]]]),
        (7, k @ (1 | 3 | 4 | 6)) => {
            splits = vec![Some(DEFAULT_SPLIT), None, Some(DEFAULT_SPLIT)];
            let upper = if k <= 3 { vec![m(2), s(1, 2), s(3, 2)] } else { vec![m(2), xor(sp(1, 2), sp(3, 2))] };
            (vec![vec![s(1, 1), s(3, 1)], upper], [&[&[1], &[0]], &[&[1]], &[&[1], &[0]]])
        }
        (7, 2) => (vec![vec![m(1), xor(w(2), w(3))], vec![xor(w(2), w(3))]], [&[&[0, 1]], &[&[1]], &[&[0, 1]]]),
        (7, _) => (vec![vec![m(1), m(3)], vec![m(2), m(3)]], [&[&[0, 1]], &[&[1]], &[&[0, 1]]]),
        (8, 2) => (vec![vec![m(1), xor(w(2), w(3))]], [&[&[0]], &[&[0]], &[&[0]]]),
        _ => (vec![vec![m(1), m(2), m(3)]], [&[&[0]], &[&[0]], &[&[0]]]),
    };
    let count = payloads.len();
    let layers = payloads.into_iter().map(|payload| Layer { alpha: 1.0 / count as f64, payload }).collect();
    let decoders = sets.iter().map(|s| schedule(s, count)).collect();
    let spec = SchemeSpec { side_info: g.clone(), splits, layers, decoders };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::recompose;

    fn scheme(group: u8, member: u8) -> Result<SchemeSpec, SimError> {
        let gm = GroupMember::new(group, member).unwrap();
        scheme_for(gm, &recompose(gm).unwrap())
    }

    #[test]
    fn table_schemes() {
        assert_eq!(scheme(1, 5).unwrap().to_string(), "x1(m1) + x2(m2) + x3(m3)");
        assert_eq!(scheme(2, 2).unwrap().to_string(), "x1(m1) + x2(m2⊕m3)");
        assert_eq!(scheme(5, 2).unwrap().to_string(), "x1([m1,m2⊕m3]) + x2(m2⊕m3)");
        assert_eq!(scheme(8, 2).unwrap().to_string(), "x([m1,m2⊕m3])");
        assert_eq!(scheme(8, 4).unwrap().to_string(), "x([m1,m2,m3])");
        assert_eq!(scheme(7, 3).unwrap().to_string(), "x1([m11,m31]) + x2([m2,m12,m32])");
        assert_eq!(scheme(7, 6).unwrap().to_string(), "x1([m11,m31]) + x2([m2,m12⊕m32])");
        assert_eq!(scheme(4, 1), Err(SimError::Unsupported(4)));
    }

    #[test]
    fn schedules_and_validation() {
        let s = scheme(1, 1).unwrap();
        assert_eq!(s.decoders[0][0], Step { decode: vec![2], noise: vec![0, 1] });
        assert_eq!(s.decoders[0][2], Step { decode: vec![0], noise: vec![] });
        assert!(s.clone().with_alphas(&[0.5, 0.5, 0.5]).is_err());
        assert!(s.with_alphas(&[0.2, 0.3, 0.5]).is_ok());
        let gm = GroupMember::new(2, 1).unwrap();
        assert!(scheme_for(gm, &recompose(GroupMember::new(3, 1).unwrap()).unwrap()).is_err());
    }

    #[test]
    fn split_bits() {
        let s = scheme(7, 1).unwrap().with_split(1, 0.25).unwrap();
        assert_eq!(s.parts().len(), 5);
        assert_eq!(s.part_bits(&[8, 3, 5]), [2, 6, 3, 3, 2]);
        assert!(s.with_split(2, 0.5).is_err());
    }
}
