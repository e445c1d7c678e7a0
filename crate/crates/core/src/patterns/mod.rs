//! Mixed-basis entanglement bookkeeping: the five preparable basis pairs,
//! the eleven pairwise entanglement relations, isotope-labeled atom
//! patterns, and their combinatorics.

mod chsh;

pub use chsh::{
    build_hybrid_state, chsh_optimize, chsh_value, observable_at_angle, ChshSettings,
    HybridForm, HybridState,
};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::QuantumError;
use crate::random::rng_from_seed;

#[derive(Debug, Clone, Error)]
pub enum PatternError {
    #[error("need at least two labels to form pairs, got {0}")]
    TooFewLabels(usize),
    #[error("peptide of length {len} cannot host {need} distinct labeled positions")]
    PeptideTooShort { len: usize, need: usize },
    #[error("a double relation needs two distinct base pairs")]
    DegenerateDouble,
    #[error("pattern must label exactly {expected} atoms, got {got}")]
    WrongAtomCount { expected: usize, got: usize },
    #[error("isotope label {0:?} appears more than once")]
    DuplicateLabel(IsotopeLabel),
    #[error("position {0} is labeled more than once")]
    DuplicatePosition(usize),
    #[error("expected {expected} pair relations, got {got}")]
    WrongPairCount { expected: usize, got: usize },
    #[error("pair ({0}, {1}) is not a valid ordered atom pair")]
    BadPair(u8, u8),
    #[error("custom amplitudes cannot be normalized")]
    NonNormalizable,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// The five preparable mixed-basis pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedBasisKind {
    PositionSpin,
    PositionPolarization,
    SpinPolarization,
    MomentumSpin,
    MomentumPolarization,
}

impl MixedBasisKind {
    pub const ALL: [MixedBasisKind; 5] = [
        MixedBasisKind::PositionSpin,
        MixedBasisKind::PositionPolarization,
        MixedBasisKind::SpinPolarization,
        MixedBasisKind::MomentumSpin,
        MixedBasisKind::MomentumPolarization,
    ];
}

/// The three mixed bases entering the pairwise-relation count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePair {
    PositionSpin,
    PositionPolarization,
    SpinPolarization,
}

impl BasePair {
    pub const ALL: [BasePair; 3] = [
        BasePair::PositionSpin,
        BasePair::PositionPolarization,
        BasePair::SpinPolarization,
    ];
}

/// One of the eleven entanglement relations a labeled atom pair can be in:
/// unentangled, entangled in one of the 3 mixed bases, in one of the 6
/// ordered combinations of two distinct mixed bases, or in all three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bases", rename_all = "snake_case")]
pub enum PairRelation {
    None,
    Single(BasePair),
    Double(BasePair, BasePair),
    Triple,
}

impl PairRelation {
    /// Build a double relation, rejecting equal base pairs.
    pub fn double(first: BasePair, second: BasePair) -> Result<Self, PatternError> {
        if first == second {
            return Err(PatternError::DegenerateDouble);
        }
        Ok(PairRelation::Double(first, second))
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        match self {
            PairRelation::Double(a, b) if a == b => Err(PatternError::DegenerateDouble),
            _ => Ok(()),
        }
    }
}

/// All 11 distinct relations: 1 none + 3 singles + 6 doubles + 1 triple.
pub fn enumerate_pair_relations() -> Vec<PairRelation> {
    let mut out = vec![PairRelation::None];
    for b in BasePair::ALL {
        out.push(PairRelation::Single(b));
    }
    for a in BasePair::ALL {
        for b in BasePair::ALL {
            if a != b {
                out.push(PairRelation::Double(a, b));
            }
        }
    }
    out.push(PairRelation::Triple);
    out
}

/// `n(n−1)/2` unordered pairs of labeled atoms.
pub fn pair_count(n_labels: usize) -> Result<u64, PatternError> {
    if n_labels < 2 {
        return Err(PatternError::TooFewLabels(n_labels));
    }
    Ok((n_labels as u64 * (n_labels as u64 - 1)) / 2)
}

/// Exact size of the pattern space: `11^n_pairs`.
pub fn pattern_space_size(n_pairs: usize) -> BigUint {
    BigUint::from(11u32).pow(n_pairs as u32)
}

/// The ten detectable isotope labels: two each for carbon, nitrogen and
/// oxygen plus four for sulfur.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IsotopeLabel {
    C1,
    C2,
    N1,
    N2,
    O1,
    O2,
    S1,
    S2,
    S3,
    S4,
}

impl IsotopeLabel {
    pub const PALETTE: [IsotopeLabel; 10] = [
        IsotopeLabel::C1,
        IsotopeLabel::C2,
        IsotopeLabel::N1,
        IsotopeLabel::N2,
        IsotopeLabel::O1,
        IsotopeLabel::O2,
        IsotopeLabel::S1,
        IsotopeLabel::S2,
        IsotopeLabel::S3,
        IsotopeLabel::S4,
    ];
}

/// A detectable isotope placed at a peptide position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledAtom {
    pub label: IsotopeLabel,
    pub position: usize,
}

/// An assignment of one of the 11 relations to each of the 45 unordered
/// pairs of the 10 labeled atoms. Pairs are keyed `(i, j)` with `i < j` by
/// atom index, giving a canonical serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternJson", into = "PatternJson")]
pub struct EntanglementPattern {
    atoms: Vec<LabeledAtom>,
    relations: BTreeMap<(u8, u8), PairRelation>,
}

impl EntanglementPattern {
    pub const N_ATOMS: usize = 10;
    pub const N_PAIRS: usize = 45;

    pub fn new(
        atoms: Vec<LabeledAtom>,
        relations: BTreeMap<(u8, u8), PairRelation>,
    ) -> Result<Self, PatternError> {
        if atoms.len() != Self::N_ATOMS {
            return Err(PatternError::WrongAtomCount {
                expected: Self::N_ATOMS,
                got: atoms.len(),
            });
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atoms[..i].iter().any(|a| a.label == atom.label) {
                return Err(PatternError::DuplicateLabel(atom.label));
            }
            if atoms[..i].iter().any(|a| a.position == atom.position) {
                return Err(PatternError::DuplicatePosition(atom.position));
            }
        }
        if relations.len() != Self::N_PAIRS {
            return Err(PatternError::WrongPairCount {
                expected: Self::N_PAIRS,
                got: relations.len(),
            });
        }
        for (&(i, j), rel) in &relations {
            if i >= j || (j as usize) >= Self::N_ATOMS {
                return Err(PatternError::BadPair(i, j));
            }
            rel.validate()?;
        }
        Ok(Self { atoms, relations })
    }

    pub fn atoms(&self) -> &[LabeledAtom] {
        &self.atoms
    }

    pub fn relations(&self) -> &BTreeMap<(u8, u8), PairRelation> {
        &self.relations
    }

    pub fn relation(&self, i: u8, j: u8) -> Option<PairRelation> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.relations.get(&key).copied()
    }
}

/// Serialization form with an explicit, canonically ordered pair list.
#[derive(Serialize, Deserialize)]
struct PatternJson {
    atoms: Vec<LabeledAtom>,
    relations: Vec<PairRelationEntry>,
}

#[derive(Serialize, Deserialize)]
struct PairRelationEntry {
    pair: (u8, u8),
    relation: PairRelation,
}

impl From<EntanglementPattern> for PatternJson {
    fn from(p: EntanglementPattern) -> Self {
        PatternJson {
            atoms: p.atoms.clone(),
            relations: p
                .relations
                .iter()
                .map(|(&pair, &relation)| PairRelationEntry { pair, relation })
                .collect(),
        }
    }
}

impl TryFrom<PatternJson> for EntanglementPattern {
    type Error = PatternError;

    fn try_from(raw: PatternJson) -> Result<Self, Self::Error> {
        let mut relations = BTreeMap::new();
        for entry in raw.relations {
            relations.insert(entry.pair, entry.relation);
        }
        EntanglementPattern::new(raw.atoms, relations)
    }
}

/// Place the ten labels at seeded-random distinct positions of a peptide and
/// draw each of the 45 pair relations uniformly from the 11 possibilities.
pub fn sample_pattern(
    peptide_length: usize,
    seed: u64,
) -> Result<EntanglementPattern, PatternError> {
    if peptide_length < EntanglementPattern::N_ATOMS {
        return Err(PatternError::PeptideTooShort {
            len: peptide_length,
            need: EntanglementPattern::N_ATOMS,
        });
    }
    let mut rng = rng_from_seed(seed);
    // Partial Fisher-Yates for 10 distinct positions.
    let mut positions: Vec<usize> = (0..peptide_length).collect();
    for pick in 0..EntanglementPattern::N_ATOMS {
        let j = rng.gen_range(pick..positions.len());
        positions.swap(pick, j);
    }
    let mut chosen: Vec<usize> = positions[..EntanglementPattern::N_ATOMS].to_vec();
    chosen.sort_unstable();

    let atoms: Vec<LabeledAtom> = IsotopeLabel::PALETTE
        .iter()
        .zip(&chosen)
        .map(|(&label, &position)| LabeledAtom { label, position })
        .collect();

    let relations_menu = enumerate_pair_relations();
    let mut relations = BTreeMap::new();
    for i in 0..EntanglementPattern::N_ATOMS as u8 {
        for j in (i + 1)..EntanglementPattern::N_ATOMS as u8 {
            let pick = rng.gen_range(0..relations_menu.len());
            relations.insert((i, j), relations_menu[pick]);
        }
    }
    EntanglementPattern::new(atoms, relations)
}
