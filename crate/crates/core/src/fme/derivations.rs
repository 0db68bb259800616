//! Shipped rate-splitting derivations and the systems they are expected to project onto.

use super::{FmeError, LinSystem, Parsed};
use crate::scalar::Exact;

/// Pre-elimination decoding conditions of one scheme with its expected projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Derivation {
    /// Short name, also the file stem under `systems/`.
    pub name: &'static str,
    /// Configurations the derivation covers.
    pub covers: &'static str,
    /// Pre-elimination system text with its `eliminate:` header.
    pub source: &'static str,
    /// Expected post-elimination system text.
    pub expected: &'static str,
}

macro_rules! derivation {
    ($name:literal, $covers:literal) => {
        Derivation {
            name: $name,
            covers: $covers,
            source: include_str!(concat!("../../systems/", $name, ".fm")),
            expected: include_str!(concat!("../../systems/", $name, ".expected.fm")),
        }
    };
}

/// All shipped derivations.
pub const DERIVATIONS: &[Derivation] = &[
    derivation!("group1", "G11 ∪ G21"),
    derivation!("g12_g21_split", "G12 ∪ G21, separate decoding"),
    derivation!("group4_m1", "G14 ∪ G21, G14 ∪ G23"),
    derivation!("group4_m4", "G14 ∪ G24, G14 ∪ G26, G14 ∪ G27, G14 ∪ G28"),
    derivation!("group4_m2", "G14 ∪ G22"),
    derivation!("group4_m5", "G14 ∪ G25"),
    derivation!("group7_m1", "G17 ∪ G21"),
    derivation!("group7_m3", "G17 ∪ G23"),
    derivation!("group7_m4", "G17 ∪ G24"),
    derivation!("group7_m6", "G17 ∪ G26"),
];

/// Derivation by name.
pub fn derivation(name: &str) -> Option<&'static Derivation> {
    DERIVATIONS.iter().find(|d| d.name == name)
}

impl Derivation {
    /// Parsed pre-elimination system.
    pub fn source<T: Exact>(&self) -> Result<Parsed<T>, FmeError> {
        LinSystem::parse(self.source)
    }

    /// Parsed expected system.
    pub fn expected<T: Exact>(&self) -> Result<LinSystem<T>, FmeError> {
        Ok(LinSystem::parse(self.expected)?.system)
    }

    /// Source system after eliminating its declared split rates.
    pub fn derive<T: Exact>(&self) -> Result<LinSystem<T>, FmeError> {
        let p = self.source::<T>()?;
        Ok(p.system.eliminate_all(&p.eliminate)?.remove_redundant())
    }
}
