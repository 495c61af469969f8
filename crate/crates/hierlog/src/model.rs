//! Layered models: per-level world sets, a domain of refinement chains, one
//! transition relation per level, and layered valuations.
//!
//! The domain stores full-length chains only; the shorter views `D_k` are
//! derived by prefix projection and memoized at construction time. Content
//! problems are collected as [`Violation`]s rather than reported one at a
//! time, so a single validation pass describes everything that is wrong.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::signature::{Signature, SignatureError, SymbolKind};

/// A world id tagged with the level it lives at.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct World {
    pub level: usize,
    pub id: String,
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// A refinement chain `(w0, ..., wk)`; component `r` lives at level `r`.
/// The empty tuple doubles as the prefix of a level-0 chain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WorldTuple(Vec<String>);

impl WorldTuple {
    pub fn new(ids: Vec<String>) -> Self {
        WorldTuple(ids)
    }

    pub fn of(ids: &[&str]) -> Self {
        WorldTuple(ids.iter().map(|s| s.to_string()).collect())
    }

    pub fn ids(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Level of a nonempty chain.
    pub fn level(&self) -> usize {
        self.0.len() - 1
    }

    pub fn last(&self) -> &str {
        self.0.last().expect("empty tuple")
    }

    /// First `n` components.
    pub fn take(&self, n: usize) -> WorldTuple {
        WorldTuple(self.0[..n].to_vec())
    }

    /// The level-`k` prefix, i.e. the first `k + 1` components.
    pub fn restrict(&self, k: usize) -> WorldTuple {
        self.take(k + 1)
    }

    /// Copy with the last component replaced.
    pub fn with_last(&self, id: &str) -> WorldTuple {
        let mut ids = self.0.clone();
        *ids.last_mut().expect("empty tuple") = id.to_string();
        WorldTuple(ids)
    }

    /// Copy with one more component appended.
    pub fn pushed(&self, id: &str) -> WorldTuple {
        let mut ids = self.0.clone();
        ids.push(id.to_string());
        WorldTuple(ids)
    }
}

impl fmt::Display for WorldTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(","))
    }
}

impl From<Vec<String>> for WorldTuple {
    fn from(ids: Vec<String>) -> Self {
        WorldTuple(ids)
    }
}

pub type TuplePair = (WorldTuple, WorldTuple);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("expected {expected} per-level {what}, got {got}")]
    LevelCountMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{context}: expected tuple of length {expected}, got {got}")]
    TupleLength {
        context: String,
        expected: usize,
        got: usize,
    },
    #[error("level {level} out of range (max {max})")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("invalid model: {count} violation(s), first: {first}")]
    InvalidModel { count: usize, first: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// One failed model invariant. `Display` yields the report line format
/// `LEVEL k: <invariant>: <witness>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// A registered world occurs in no domain chain.
    ProjectionFailure(World),
    /// A domain chain mentions an unregistered world.
    UnregisteredWorld(World),
    /// A relation endpoint is not a domain chain of its level.
    RelationOutsideDomain { level: usize, tuple: WorldTuple },
    /// A valuation entry names a symbol that is not a proposition.
    PropValBadSymbol { name: String },
    /// A proposition entry whose prefix has the wrong length or is not in
    /// the level-below domain.
    PropValBadPrefix { prop: String, prefix: WorldTuple },
    /// A proposition entry lists a world outside its level's world set.
    PropValBadWorld { prop: String, world: World },
    /// A nominal declared in the signature has no denotation.
    NomValMissing { nominal: String },
    /// A denotation entry names a symbol that is not a nominal.
    NomValBadSymbol { name: String },
    /// A nominal denotes an unregistered world.
    NomValBadWorld { nominal: String, world: World },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ProjectionFailure(w) => {
                write!(f, "LEVEL {}: ProjectionFailure: {}", w.level, w.id)
            }
            Violation::UnregisteredWorld(w) => {
                write!(f, "LEVEL {}: UnregisteredWorld: {}", w.level, w.id)
            }
            Violation::RelationOutsideDomain { level, tuple } => {
                write!(f, "LEVEL {level}: RelationOutsideDomain: {tuple}")
            }
            Violation::PropValBadSymbol { name } => {
                write!(f, "PROPVAL: BadSymbol: {name}")
            }
            Violation::PropValBadPrefix { prop, prefix } => {
                write!(f, "PROPVAL: BadPrefix: {prop} at {prefix}")
            }
            Violation::PropValBadWorld { prop, world } => {
                write!(
                    f,
                    "LEVEL {}: PropValBadWorld: {} in {}",
                    world.level, world.id, prop
                )
            }
            Violation::NomValMissing { nominal } => {
                write!(f, "NOMVAL: Missing: {nominal}")
            }
            Violation::NomValBadSymbol { name } => {
                write!(f, "NOMVAL: BadSymbol: {name}")
            }
            Violation::NomValBadWorld { nominal, world } => {
                write!(
                    f,
                    "LEVEL {}: NomValBadWorld: {} for {}",
                    world.level, world.id, nominal
                )
            }
        }
    }
}

/// Outcome of the hierarchy check: either every relation projects onto the
/// one below it, or a witness pair says where that fails first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hierarchy {
    Hierarchical,
    NotHierarchical {
        level: usize,
        pair: TuplePair,
        /// True when the pair comes from projecting `R_level` but is absent
        /// from the relation one level below; false for the converse gap.
        missing_from_lower: bool,
    },
}

/// A layered model over a [`Signature`]. Relations at level `k` connect
/// whole level-`k` chains, so a transition may change any component.
#[derive(Debug, Clone)]
pub struct LayeredModel {
    sig: Signature,
    worlds: Vec<BTreeSet<String>>,
    rels: Vec<BTreeSet<TuplePair>>,
    propval: BTreeMap<(String, WorldTuple), BTreeSet<String>>,
    nomval: BTreeMap<String, String>,
    /// `domains[k]` is the level-k prefix projection of the full domain.
    domains: Vec<BTreeSet<WorldTuple>>,
    violations: Vec<Violation>,
}

impl PartialEq for LayeredModel {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig
            && self.worlds == other.worlds
            && self.domain() == other.domain()
            && self.rels == other.rels
            && self.propval == other.propval
            && self.nomval == other.nomval
    }
}

impl Eq for LayeredModel {}

impl LayeredModel {
    pub fn new(
        sig: Signature,
        worlds: Vec<BTreeSet<String>>,
        domain: BTreeSet<WorldTuple>,
        rels: Vec<BTreeSet<TuplePair>>,
        propval: BTreeMap<(String, WorldTuple), BTreeSet<String>>,
        nomval: BTreeMap<String, String>,
    ) -> Result<Self, ModelError> {
        let depth = sig.depth();
        if worlds.len() != depth + 1 {
            return Err(ModelError::LevelCountMismatch {
                what: "world sets",
                expected: depth + 1,
                got: worlds.len(),
            });
        }
        if rels.len() != depth + 1 {
            return Err(ModelError::LevelCountMismatch {
                what: "relations",
                expected: depth + 1,
                got: rels.len(),
            });
        }
        for t in &domain {
            if t.len() != depth + 1 {
                return Err(ModelError::TupleLength {
                    context: format!("domain chain {t}"),
                    expected: depth + 1,
                    got: t.len(),
                });
            }
        }
        for (k, rel) in rels.iter().enumerate() {
            for (s, t) in rel {
                for side in [s, t] {
                    if side.len() != k + 1 {
                        return Err(ModelError::TupleLength {
                            context: format!("level-{k} relation endpoint {side}"),
                            expected: k + 1,
                            got: side.len(),
                        });
                    }
                }
            }
        }
        let domains: Vec<BTreeSet<WorldTuple>> = (0..=depth)
            .map(|k| domain.iter().map(|t| t.restrict(k)).collect())
            .collect();
        let mut model = LayeredModel {
            sig,
            worlds,
            rels,
            propval,
            nomval,
            domains,
            violations: Vec::new(),
        };
        model.violations = model.compute_violations();
        Ok(model)
    }

    fn compute_violations(&self) -> Vec<Violation> {
        let mut out = BTreeSet::new();
        let depth = self.depth();
        for k in 0..=depth {
            for id in &self.worlds[k] {
                if !self.domains[k].iter().any(|t| &t.ids()[k] == id) {
                    out.insert(Violation::ProjectionFailure(World {
                        level: k,
                        id: id.clone(),
                    }));
                }
            }
        }
        for t in self.domain() {
            for (r, id) in t.ids().iter().enumerate() {
                if !self.worlds[r].contains(id) {
                    out.insert(Violation::UnregisteredWorld(World {
                        level: r,
                        id: id.clone(),
                    }));
                }
            }
        }
        for (k, rel) in self.rels.iter().enumerate() {
            for (s, t) in rel {
                for side in [s, t] {
                    if !self.domains[k].contains(side) {
                        out.insert(Violation::RelationOutsideDomain {
                            level: k,
                            tuple: side.clone(),
                        });
                    }
                }
            }
        }
        for ((prop, prefix), vals) in &self.propval {
            match self.sig.symbol_level(prop) {
                Ok((level, SymbolKind::Prop)) => {
                    let prefix_ok = prefix.len() == level
                        && (level == 0 || self.domains[level - 1].contains(prefix));
                    if !prefix_ok {
                        out.insert(Violation::PropValBadPrefix {
                            prop: prop.clone(),
                            prefix: prefix.clone(),
                        });
                    }
                    for w in vals {
                        if !self.worlds[level].contains(w) {
                            out.insert(Violation::PropValBadWorld {
                                prop: prop.clone(),
                                world: World {
                                    level,
                                    id: w.clone(),
                                },
                            });
                        }
                    }
                }
                _ => {
                    out.insert(Violation::PropValBadSymbol { name: prop.clone() });
                }
            }
        }
        for k in 0..=depth {
            for nom in self.sig.noms_at(k) {
                match self.nomval.get(nom) {
                    None => {
                        out.insert(Violation::NomValMissing {
                            nominal: nom.clone(),
                        });
                    }
                    Some(id) if !self.worlds[k].contains(id) => {
                        out.insert(Violation::NomValBadWorld {
                            nominal: nom.clone(),
                            world: World {
                                level: k,
                                id: id.clone(),
                            },
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        for name in self.nomval.keys() {
            if !matches!(self.sig.symbol_level(name), Ok((_, SymbolKind::Nom))) {
                out.insert(Violation::NomValBadSymbol { name: name.clone() });
            }
        }
        out.into_iter().collect()
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn depth(&self) -> usize {
        self.sig.depth()
    }

    pub fn worlds_at(&self, level: usize) -> &BTreeSet<String> {
        &self.worlds[level]
    }

    /// The full-length domain.
    pub fn domain(&self) -> &BTreeSet<WorldTuple> {
        &self.domains[self.depth()]
    }

    /// The level-`k` prefix projection of the domain.
    pub fn domain_at(&self, level: usize) -> &BTreeSet<WorldTuple> {
        &self.domains[level]
    }

    pub fn rel_at(&self, level: usize) -> &BTreeSet<TuplePair> {
        &self.rels[level]
    }

    pub fn rels(&self) -> &[BTreeSet<TuplePair>] {
        &self.rels
    }

    pub fn propval(&self) -> &BTreeMap<(String, WorldTuple), BTreeSet<String>> {
        &self.propval
    }

    pub fn nomval(&self) -> &BTreeMap<String, String> {
        &self.nomval
    }

    /// All invariant violations found at construction time.
    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn require_valid(&self) -> Result<(), ModelError> {
        match self.violations.first() {
            None => Ok(()),
            Some(first) => Err(ModelError::InvalidModel {
                count: self.violations.len(),
                first: first.to_string(),
            }),
        }
    }

    /// World denoted by a nominal, if the model assigns one.
    pub fn nominal_world(&self, nominal: &str) -> Option<&str> {
        self.nomval.get(nominal).map(String::as_str)
    }

    /// Whether the level-`k` proposition `prop` holds at the level-`k` chain
    /// `point` (the prefix selects the valuation slice).
    pub fn prop_contains(&self, prop: &str, point: &WorldTuple) -> bool {
        let Ok((level, SymbolKind::Prop)) = self.sig.symbol_level(prop) else {
            return false;
        };
        if point.len() != level + 1 {
            return false;
        }
        self.propval
            .get(&(prop.to_string(), point.take(level)))
            .is_some_and(|set| set.contains(point.last()))
    }

    /// The sub-model keeping levels `0..=level`: restricted signature and
    /// domain, with the per-level relations and valuations carried over.
    pub fn restrict(&self, level: usize) -> Result<LayeredModel, ModelError> {
        self.require_valid()?;
        if level > self.depth() {
            return Err(ModelError::LevelOutOfRange {
                level,
                max: self.depth(),
            });
        }
        let sig = self.sig.restrict(level)?;
        let propval = self
            .propval
            .iter()
            .filter(|((p, _), _)| matches!(self.sig.symbol_level(p), Ok((l, _)) if l <= level))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let nomval = self
            .nomval
            .iter()
            .filter(|(n, _)| matches!(self.sig.symbol_level(n), Ok((l, _)) if l <= level))
            .map(|(n, w)| (n.clone(), w.clone()))
            .collect();
        LayeredModel::new(
            sig,
            self.worlds[..=level].to_vec(),
            self.domains[level].clone(),
            self.rels[..=level].to_vec(),
            propval,
            nomval,
        )
    }

    /// Checks that every relation projects exactly onto the one below it.
    pub fn hierarchy(&self) -> Result<Hierarchy, ModelError> {
        self.require_valid()?;
        for k in 1..=self.depth() {
            let projected = restrict_relation(&self.rels[k], k - 1)?;
            let below = &self.rels[k - 1];
            if &projected == below {
                continue;
            }
            let from_above = projected.difference(below).next().cloned();
            let from_below = below.difference(&projected).next().cloned();
            let (pair, missing_from_lower) = match (from_above, from_below) {
                (Some(a), Some(b)) => {
                    if a <= b {
                        (a, true)
                    } else {
                        (b, false)
                    }
                }
                (Some(a), None) => (a, true),
                (None, Some(b)) => (b, false),
                (None, None) => unreachable!("sets differ"),
            };
            return Ok(Hierarchy::NotHierarchical {
                level: k,
                pair,
                missing_from_lower,
            });
        }
        Ok(Hierarchy::Hierarchical)
    }
}

/// Level-`k` prefix projection of a set of chains.
pub fn restrict_predicate(
    set: &BTreeSet<WorldTuple>,
    k: usize,
) -> Result<BTreeSet<WorldTuple>, ModelError> {
    let mut out = BTreeSet::new();
    for t in set {
        if t.len() < k + 1 {
            return Err(ModelError::LevelOutOfRange {
                level: k,
                max: t.len() - 1,
            });
        }
        out.insert(t.restrict(k));
    }
    Ok(out)
}

/// Componentwise level-`k` prefix projection of a set of chain pairs.
pub fn restrict_relation(
    rel: &BTreeSet<TuplePair>,
    k: usize,
) -> Result<BTreeSet<TuplePair>, ModelError> {
    let mut out = BTreeSet::new();
    for (s, t) in rel {
        for side in [s, t] {
            if side.len() < k + 1 {
                return Err(ModelError::LevelOutOfRange {
                    level: k,
                    max: side.len() - 1,
                });
            }
        }
        out.insert((s.restrict(k), t.restrict(k)));
    }
    Ok(out)
}
