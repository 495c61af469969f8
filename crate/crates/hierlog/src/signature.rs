//! Layered signatures: one set of propositions and one set of nominals per
//! level, all pairwise disjoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Whether a symbol names a proposition or a nominal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Prop,
    Nom,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Prop => write!(f, "prop"),
            SymbolKind::Nom => write!(f, "nom"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{name}` declared more than once (levels {levels:?})")]
    DuplicateSymbol { name: String, levels: Vec<usize> },
    #[error("malformed symbol name `{name}`")]
    BadName { name: String },
    #[error("expected {expected} per-level symbol sets, got {got}")]
    LevelCountMismatch { expected: usize, got: usize },
    #[error("level {level} out of range for depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
}

/// A signature of some depth `n`: proposition sets `props[0..=n]` and nominal
/// sets `noms[0..=n]`. All `2(n + 1)` sets are pairwise disjoint, so a symbol
/// name determines its level and kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    props: Vec<BTreeSet<String>>,
    noms: Vec<BTreeSet<String>>,
    index: BTreeMap<String, (usize, SymbolKind)>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new(
        depth: usize,
        props: Vec<BTreeSet<String>>,
        noms: Vec<BTreeSet<String>>,
    ) -> Result<Self, SignatureError> {
        for seq in [&props, &noms] {
            if seq.len() != depth + 1 {
                return Err(SignatureError::LevelCountMismatch {
                    expected: depth + 1,
                    got: seq.len(),
                });
            }
        }
        let mut index: BTreeMap<String, (usize, SymbolKind)> = BTreeMap::new();
        let mut seen: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (kind, sets) in [(SymbolKind::Prop, &props), (SymbolKind::Nom, &noms)] {
            for (level, set) in sets.iter().enumerate() {
                for name in set {
                    if !valid_name(name) {
                        return Err(SignatureError::BadName { name: name.clone() });
                    }
                    seen.entry(name).or_default().push(level);
                    index.insert(name.clone(), (level, kind));
                }
            }
        }
        if let Some((name, levels)) = seen.into_iter().find(|(_, ls)| ls.len() > 1) {
            return Err(SignatureError::DuplicateSymbol {
                name: name.to_owned(),
                levels,
            });
        }
        Ok(Signature { props, noms, index })
    }

    pub fn depth(&self) -> usize {
        self.props.len() - 1
    }

    /// Proposition symbols declared at `level`. Panics if out of range.
    pub fn props_at(&self, level: usize) -> &BTreeSet<String> {
        &self.props[level]
    }

    /// Nominal symbols declared at `level`. Panics if out of range.
    pub fn noms_at(&self, level: usize) -> &BTreeSet<String> {
        &self.noms[level]
    }

    /// The sub-signature keeping levels `0..=level`.
    pub fn restrict(&self, level: usize) -> Result<Signature, SignatureError> {
        if level > self.depth() {
            return Err(SignatureError::LevelOutOfRange {
                level,
                depth: self.depth(),
            });
        }
        Signature::new(
            level,
            self.props[..=level].to_vec(),
            self.noms[..=level].to_vec(),
        )
    }

    /// Level and kind of a declared symbol.
    pub fn symbol_level(&self, name: &str) -> Result<(usize, SymbolKind), SignatureError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SignatureError::UnknownSymbol {
                name: name.to_owned(),
            })
    }
}
