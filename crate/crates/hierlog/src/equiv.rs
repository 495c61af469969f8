//! Layered and hierarchical bisimulation, simulation, and refinement.
//!
//! A layered family relates level-`k` chains of two models level by
//! level; each component must satisfy atom harmony (propositions, named
//! chains, and nominal jump targets) plus forward/backward transfer on
//! that level's relation. A hierarchical relation instead relates full
//! chains of two hierarchical models, imposes the atom conditions at
//! every level through prefix projection, and transfers moves only at the
//! top level.
//!
//! The nominal jump condition is read conditionally: both sides must
//! agree on whether the jump target chain exists, and when it does on
//! both sides the two target chains must be related. An unconditional
//! reading would force every jump target into the domain and would
//! reject the identity family on models where some nominal is not
//! reachable as a sibling chain.
//!
//! Largest relations are computed as greatest fixpoints: start from all
//! pairs satisfying the pair-local conditions, then delete pairs whose
//! jump-target or transfer obligations point at deleted pairs, until
//! stable. Checking scans levels bottom up and pairs in lexicographic
//! order, so the reported violation is deterministic.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Hierarchy, LayeredModel, ModelError, TuplePair, WorldTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Layered,
    Hierarchical,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Layered => write!(f, "layered"),
            FamilyKind::Hierarchical => write!(f, "hierarchical"),
        }
    }
}

/// A candidate (bi)simulation: one pair set per level, or a single pair
/// set over full chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationFamily {
    Layered(Vec<BTreeSet<TuplePair>>),
    Hierarchical(BTreeSet<TuplePair>),
}

impl RelationFamily {
    pub fn kind(&self) -> FamilyKind {
        match self {
            RelationFamily::Layered(_) => FamilyKind::Layered,
            RelationFamily::Hierarchical(_) => FamilyKind::Hierarchical,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            RelationFamily::Layered(levels) => levels.iter().all(BTreeSet::is_empty),
            RelationFamily::Hierarchical(set) => set.is_empty(),
        }
    }

    pub fn layered_components(&self) -> Option<&[BTreeSet<TuplePair>]> {
        match self {
            RelationFamily::Layered(levels) => Some(levels),
            RelationFamily::Hierarchical(_) => None,
        }
    }

    pub fn hierarchical_component(&self) -> Option<&BTreeSet<TuplePair>> {
        match self {
            RelationFamily::Layered(_) => None,
            RelationFamily::Hierarchical(set) => Some(set),
        }
    }

    /// First `k + 1` components of a layered family.
    pub fn truncate(&self, k: usize) -> Option<RelationFamily> {
        match self {
            RelationFamily::Layered(levels) if k < levels.len() => {
                Some(RelationFamily::Layered(levels[..=k].to_vec()))
            }
            _ => None,
        }
    }

    /// The identity family on a model's own domains.
    pub fn identity(model: &LayeredModel, kind: FamilyKind) -> RelationFamily {
        match kind {
            FamilyKind::Layered => RelationFamily::Layered(
                (0..=model.depth())
                    .map(|k| {
                        model
                            .domain_at(k)
                            .iter()
                            .map(|u| (u.clone(), u.clone()))
                            .collect()
                    })
                    .collect(),
            ),
            FamilyKind::Hierarchical => RelationFamily::Hierarchical(
                model
                    .domain()
                    .iter()
                    .map(|u| (u.clone(), u.clone()))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("{side} model invalid: {first}")]
    InvalidModel { side: &'static str, first: String },
    #[error("{side} model is not hierarchical")]
    NotHierarchical { side: &'static str },
    #[error("malformed relation family: {0}")]
    MalformedFamily(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The first clause a checked family breaks. `level` is the clause's
/// level; for hierarchical families the pair is the full related pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClauseViolation {
    Atom1 {
        level: usize,
        pair: TuplePair,
        prop: String,
    },
    Atom2i {
        level: usize,
        pair: TuplePair,
        nominal: String,
    },
    Atom2ii {
        level: usize,
        pair: TuplePair,
        nominal: String,
    },
    Zig {
        level: usize,
        pair: TuplePair,
    },
    Zag {
        level: usize,
        pair: TuplePair,
    },
}

fn pair_str(pair: &TuplePair) -> String {
    format!("({},{})", pair.0, pair.1)
}

impl fmt::Display for ClauseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClauseViolation::Atom1 { level, pair, prop } => write!(
                f,
                "ATOM_{level} 1 violated at {}: proposition {prop}",
                pair_str(pair)
            ),
            ClauseViolation::Atom2i {
                level,
                pair,
                nominal,
            } => write!(
                f,
                "ATOM_{level} 2.i violated at {}: nominal {nominal}",
                pair_str(pair)
            ),
            ClauseViolation::Atom2ii {
                level,
                pair,
                nominal,
            } => write!(
                f,
                "ATOM_{level} 2.ii violated at {}: nominal {nominal}",
                pair_str(pair)
            ),
            ClauseViolation::Zig { level, pair } => {
                write!(f, "ZIG_{level} violated at {}", pair_str(pair))
            }
            ClauseViolation::Zag { level, pair } => {
                write!(f, "ZAG_{level} violated at {}", pair_str(pair))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(ClauseViolation),
}

/// Outcome of a totality test: every source chain has a partner, or a
/// first witness without one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimVerdict {
    Total,
    NotTotal { level: usize, witness: WorldTuple },
}

impl fmt::Display for SimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimVerdict::Total => write!(f, "total"),
            SimVerdict::NotTotal { level, witness } => {
                write!(f, "not total: level-{level} chain {witness} has no partner")
            }
        }
    }
}

fn side_valid(m: &LayeredModel, side: &'static str) -> Result<(), EquivError> {
    m.require_valid().map_err(|e| match e {
        ModelError::InvalidModel { first, .. } => EquivError::InvalidModel { side, first },
        other => EquivError::Model(other),
    })
}

fn require_hierarchical(m: &LayeredModel, side: &'static str) -> Result<(), EquivError> {
    match m.hierarchy()? {
        Hierarchy::Hierarchical => Ok(()),
        Hierarchy::NotHierarchical { .. } => Err(EquivError::NotHierarchical { side }),
    }
}

fn common_checks(m: &LayeredModel, mp: &LayeredModel, kind: FamilyKind) -> Result<(), EquivError> {
    side_valid(m, "left")?;
    side_valid(mp, "right")?;
    if m.sig() != mp.sig() {
        return Err(EquivError::SignatureMismatch);
    }
    if kind == FamilyKind::Hierarchical {
        require_hierarchical(m, "left")?;
        require_hierarchical(mp, "right")?;
    }
    Ok(())
}

fn validate_family(
    m: &LayeredModel,
    mp: &LayeredModel,
    family: &RelationFamily,
    kind: FamilyKind,
) -> Result<(), EquivError> {
    if family.kind() != kind {
        return Err(EquivError::MalformedFamily(format!(
            "{} family given for a {kind} check",
            family.kind()
        )));
    }
    match family {
        RelationFamily::Layered(levels) => {
            if levels.len() != m.depth() + 1 {
                return Err(EquivError::MalformedFamily(format!(
                    "expected {} levels, got {}",
                    m.depth() + 1,
                    levels.len()
                )));
            }
            for (k, pairs) in levels.iter().enumerate() {
                for (a, b) in pairs {
                    if a.len() != k + 1 || b.len() != k + 1 {
                        return Err(EquivError::MalformedFamily(format!(
                            "pair ({a},{b}) at level {k} has wrong tuple lengths"
                        )));
                    }
                    if !m.domain_at(k).contains(a) || !mp.domain_at(k).contains(b) {
                        return Err(EquivError::MalformedFamily(format!(
                            "pair ({a},{b}) at level {k} is outside the domains"
                        )));
                    }
                }
            }
        }
        RelationFamily::Hierarchical(set) => {
            let n = m.depth();
            for (a, b) in set {
                if a.len() != n + 1 || b.len() != n + 1 {
                    return Err(EquivError::MalformedFamily(format!(
                        "pair ({a},{b}) must relate full level-{n} chains"
                    )));
                }
                if !m.domain().contains(a) || !mp.domain().contains(b) {
                    return Err(EquivError::MalformedFamily(format!(
                        "pair ({a},{b}) is outside the domains"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Proposition harmony at clause level `k` (prefixes of `u`, `up`).
fn atom1_violation(
    m: &LayeredModel,
    mp: &LayeredModel,
    k: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    forward_only: bool,
) -> Option<String> {
    for p in m.sig().props_at(k) {
        let a = m.prop_contains(p, &u.restrict(k));
        let b = mp.prop_contains(p, &up.restrict(k));
        let violated = if forward_only { a && !b } else { a != b };
        if violated {
            return Some(p.clone());
        }
    }
    None
}

/// The level-`k` jump target of `u` for nominal `i`, and whether it is a
/// domain chain.
fn jump(m: &LayeredModel, k: usize, u: &WorldTuple, nominal: &str) -> (WorldTuple, bool) {
    let w = m
        .nominal_world(nominal)
        .expect("valid model names every nominal");
    let sub = u.take(k).pushed(w);
    let in_domain = m.domain_at(k).contains(&sub);
    (sub, in_domain)
}

/// Pair-local part of the jump clause: target existence must agree.
fn atom2i_domain_violated(
    m: &LayeredModel,
    mp: &LayeredModel,
    k: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    nominal: &str,
    forward_only: bool,
) -> bool {
    let (_, du) = jump(m, k, u, nominal);
    let (_, dup) = jump(mp, k, up, nominal);
    if forward_only {
        du && !dup
    } else {
        du != dup
    }
}

/// Family-dependent part of the jump clause: existing targets related.
fn atom2i_transfer_violated(
    m: &LayeredModel,
    mp: &LayeredModel,
    k: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    nominal: &str,
    related: &dyn Fn(&WorldTuple, &WorldTuple) -> bool,
) -> bool {
    let (sub, du) = jump(m, k, u, nominal);
    let (subp, dup) = jump(mp, k, up, nominal);
    du && dup && !related(&sub, &subp)
}

/// Naming harmony: being the chain a nominal denotes must agree.
fn atom2ii_violated(
    m: &LayeredModel,
    mp: &LayeredModel,
    k: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    nominal: &str,
    forward_only: bool,
) -> bool {
    let (_, du) = jump(m, k, u, nominal);
    let (_, dup) = jump(mp, k, up, nominal);
    let w = m.nominal_world(nominal).expect("checked");
    let wp = mp.nominal_world(nominal).expect("checked");
    let named = u.ids()[k] == w && du;
    let namedp = up.ids()[k] == wp && dup;
    if forward_only {
        named && !namedp
    } else {
        named != namedp
    }
}

/// Forward transfer on the level-`rel` relation: every move of `u` in `m`
/// is matched by a move of `up` in `mp` with related targets.
fn zig_violated(
    m: &LayeredModel,
    mp: &LayeredModel,
    rel: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    related: &dyn Fn(&WorldTuple, &WorldTuple) -> bool,
) -> bool {
    m.rel_at(rel).iter().any(|(s, v)| {
        s == u
            && !mp
                .rel_at(rel)
                .iter()
                .any(|(sp, vp)| sp == up && related(v, vp))
    })
}

/// Backward transfer: every move of `up` in `mp` matched from `u` in `m`.
fn zag_violated(
    m: &LayeredModel,
    mp: &LayeredModel,
    rel: usize,
    u: &WorldTuple,
    up: &WorldTuple,
    related: &dyn Fn(&WorldTuple, &WorldTuple) -> bool,
) -> bool {
    mp.rel_at(rel)
        .iter()
        .any(|(sp, vp)| sp == up && !m.rel_at(rel).iter().any(|(s, v)| s == u && related(v, vp)))
}

/// Atom clauses for one pair at one level, in reporting order.
fn atom_violation(
    m: &LayeredModel,
    mp: &LayeredModel,
    k: usize,
    pair: &TuplePair,
    forward_only: bool,
    related: &dyn Fn(&WorldTuple, &WorldTuple) -> bool,
) -> Option<ClauseViolation> {
    let (u, up) = pair;
    if let Some(prop) = atom1_violation(m, mp, k, u, up, forward_only) {
        return Some(ClauseViolation::Atom1 {
            level: k,
            pair: pair.clone(),
            prop,
        });
    }
    for i in m.sig().noms_at(k) {
        if atom2i_domain_violated(m, mp, k, u, up, i, forward_only)
            || atom2i_transfer_violated(m, mp, k, u, up, i, related)
        {
            return Some(ClauseViolation::Atom2i {
                level: k,
                pair: pair.clone(),
                nominal: i.clone(),
            });
        }
        if atom2ii_violated(m, mp, k, u, up, i, forward_only) {
            return Some(ClauseViolation::Atom2ii {
                level: k,
                pair: pair.clone(),
                nominal: i.clone(),
            });
        }
    }
    None
}

fn scan(
    m: &LayeredModel,
    mp: &LayeredModel,
    family: &RelationFamily,
    forward_only: bool,
    with_zag: bool,
) -> Verdict {
    match family {
        RelationFamily::Layered(levels) => {
            for (k, pairs) in levels.iter().enumerate() {
                let related =
                    |a: &WorldTuple, b: &WorldTuple| pairs.contains(&(a.clone(), b.clone()));
                for pair in pairs {
                    if let Some(v) = atom_violation(m, mp, k, pair, forward_only, &related) {
                        return Verdict::Violated(v);
                    }
                    let (u, up) = pair;
                    if zig_violated(m, mp, k, u, up, &related) {
                        return Verdict::Violated(ClauseViolation::Zig {
                            level: k,
                            pair: pair.clone(),
                        });
                    }
                    if with_zag && zag_violated(m, mp, k, u, up, &related) {
                        return Verdict::Violated(ClauseViolation::Zag {
                            level: k,
                            pair: pair.clone(),
                        });
                    }
                }
            }
            Verdict::Holds
        }
        RelationFamily::Hierarchical(set) => {
            let n = m.depth();
            let induced: Vec<BTreeSet<TuplePair>> = (0..=n)
                .map(|k| {
                    set.iter()
                        .map(|(a, b)| (a.restrict(k), b.restrict(k)))
                        .collect()
                })
                .collect();
            let full = |a: &WorldTuple, b: &WorldTuple| set.contains(&(a.clone(), b.clone()));
            for pair in set {
                for (k, level_pairs) in induced.iter().enumerate() {
                    let related = |a: &WorldTuple, b: &WorldTuple| {
                        level_pairs.contains(&(a.clone(), b.clone()))
                    };
                    if let Some(v) = atom_violation(m, mp, k, pair, forward_only, &related) {
                        return Verdict::Violated(v);
                    }
                }
                let (u, up) = pair;
                if zig_violated(m, mp, n, u, up, &full) {
                    return Verdict::Violated(ClauseViolation::Zig {
                        level: n,
                        pair: pair.clone(),
                    });
                }
                if with_zag && zag_violated(m, mp, n, u, up, &full) {
                    return Verdict::Violated(ClauseViolation::Zag {
                        level: n,
                        pair: pair.clone(),
                    });
                }
            }
            Verdict::Holds
        }
    }
}

/// Pair-local admission test used to seed the fixpoint.
fn pair_local_ok(
    m: &LayeredModel,
    mp: &LayeredModel,
    levels: std::ops::RangeInclusive<usize>,
    u: &WorldTuple,
    up: &WorldTuple,
    forward_only: bool,
) -> bool {
    levels.into_iter().all(|k| {
        atom1_violation(m, mp, k, u, up, forward_only).is_none()
            && m.sig().noms_at(k).iter().all(|i| {
                !atom2i_domain_violated(m, mp, k, u, up, i, forward_only)
                    && !atom2ii_violated(m, mp, k, u, up, i, forward_only)
            })
    })
}

/// Family-dependent obligations of one pair under a snapshot.
fn transfer_ok(
    m: &LayeredModel,
    mp: &LayeredModel,
    levels: std::ops::RangeInclusive<usize>,
    u: &WorldTuple,
    up: &WorldTuple,
    related_at: &dyn Fn(usize, &WorldTuple, &WorldTuple) -> bool,
) -> bool {
    levels.into_iter().all(|k| {
        m.sig()
            .noms_at(k)
            .iter()
            .all(|i| !atom2i_transfer_violated(m, mp, k, u, up, i, &|a, b| related_at(k, a, b)))
    })
}

fn largest(
    m: &LayeredModel,
    mp: &LayeredModel,
    kind: FamilyKind,
    forward_only: bool,
    with_zag: bool,
) -> RelationFamily {
    let n = m.depth();
    match kind {
        FamilyKind::Layered => {
            let mut levels: Vec<BTreeSet<TuplePair>> = (0..=n)
                .map(|k| {
                    m.domain_at(k)
                        .iter()
                        .flat_map(|u| mp.domain_at(k).iter().map(move |up| (u, up)))
                        .filter(|(u, up)| pair_local_ok(m, mp, k..=k, u, up, forward_only))
                        .map(|(u, up)| (u.clone(), up.clone()))
                        .collect()
                })
                .collect();
            loop {
                let mut changed = false;
                for (k, level_pairs) in levels.iter_mut().enumerate() {
                    let snapshot = level_pairs.clone();
                    let related =
                        |a: &WorldTuple, b: &WorldTuple| snapshot.contains(&(a.clone(), b.clone()));
                    level_pairs.retain(|(u, up)| {
                        transfer_ok(m, mp, k..=k, u, up, &|_, a, b| related(a, b))
                            && !zig_violated(m, mp, k, u, up, &related)
                            && (!with_zag || !zag_violated(m, mp, k, u, up, &related))
                    });
                    if level_pairs.len() != snapshot.len() {
                        changed = true;
                    }
                }
                if !changed {
                    return RelationFamily::Layered(levels);
                }
            }
        }
        FamilyKind::Hierarchical => {
            let mut set: BTreeSet<TuplePair> = m
                .domain()
                .iter()
                .flat_map(|u| mp.domain().iter().map(move |up| (u, up)))
                .filter(|(u, up)| pair_local_ok(m, mp, 0..=n, u, up, forward_only))
                .map(|(u, up)| (u.clone(), up.clone()))
                .collect();
            loop {
                let snapshot = set.clone();
                let induced: Vec<BTreeSet<TuplePair>> = (0..=n)
                    .map(|k| {
                        snapshot
                            .iter()
                            .map(|(a, b)| (a.restrict(k), b.restrict(k)))
                            .collect()
                    })
                    .collect();
                let full =
                    |a: &WorldTuple, b: &WorldTuple| snapshot.contains(&(a.clone(), b.clone()));
                set.retain(|(u, up)| {
                    transfer_ok(m, mp, 0..=n, u, up, &|k, a, b| {
                        induced[k].contains(&(a.clone(), b.clone()))
                    }) && !zig_violated(m, mp, n, u, up, &full)
                        && (!with_zag || !zag_violated(m, mp, n, u, up, &full))
                });
                if set.len() == snapshot.len() {
                    return RelationFamily::Hierarchical(set);
                }
            }
        }
    }
}

/// Checks a candidate bisimulation, reporting the first broken clause.
pub fn check_bisimulation(
    m: &LayeredModel,
    mp: &LayeredModel,
    family: &RelationFamily,
    kind: FamilyKind,
) -> Result<Verdict, EquivError> {
    common_checks(m, mp, kind)?;
    validate_family(m, mp, family, kind)?;
    Ok(scan(m, mp, family, false, true))
}

/// Checks a candidate simulation from `m` to `mp` (one-directional atom
/// clauses, forward transfer only).
pub fn check_simulation(
    m: &LayeredModel,
    mp: &LayeredModel,
    family: &RelationFamily,
    kind: FamilyKind,
) -> Result<Verdict, EquivError> {
    common_checks(m, mp, kind)?;
    validate_family(m, mp, family, kind)?;
    Ok(scan(m, mp, family, true, false))
}

/// The union of all bisimulations of the given kind.
pub fn largest_bisimulation(
    m: &LayeredModel,
    mp: &LayeredModel,
    kind: FamilyKind,
) -> Result<RelationFamily, EquivError> {
    common_checks(m, mp, kind)?;
    Ok(largest(m, mp, kind, false, true))
}

/// The union of all simulations from `m` to `mp` of the given kind.
pub fn largest_simulation(
    m: &LayeredModel,
    mp: &LayeredModel,
    kind: FamilyKind,
) -> Result<RelationFamily, EquivError> {
    common_checks(m, mp, kind)?;
    Ok(largest(m, mp, kind, true, false))
}

/// Whether `mp` simulates `m` levelwise: the largest layered simulation
/// must relate every chain of `m` at every level.
pub fn l_simulates(m: &LayeredModel, mp: &LayeredModel) -> Result<SimVerdict, EquivError> {
    let family = largest_simulation(m, mp, FamilyKind::Layered)?;
    let levels = family
        .layered_components()
        .expect("layered by construction");
    for (k, pairs) in levels.iter().enumerate() {
        for u in m.domain_at(k) {
            if !pairs.iter().any(|(a, _)| a == u) {
                return Ok(SimVerdict::NotTotal {
                    level: k,
                    witness: u.clone(),
                });
            }
        }
    }
    Ok(SimVerdict::Total)
}

/// Whether `mp` simulates `m` hierarchically: the largest hierarchical
/// simulation must relate every full chain of `m`.
pub fn h_simulates(m: &LayeredModel, mp: &LayeredModel) -> Result<SimVerdict, EquivError> {
    let family = largest_simulation(m, mp, FamilyKind::Hierarchical)?;
    let set = family
        .hierarchical_component()
        .expect("hierarchical by construction");
    for u in m.domain() {
        if !set.iter().any(|(a, _)| a == u) {
            return Ok(SimVerdict::NotTotal {
                level: m.depth(),
                witness: u.clone(),
            });
        }
    }
    Ok(SimVerdict::Total)
}

/// Whether the deeper model `n` refines `m`: `n`'s signature must
/// restrict to `m`'s, and `n` truncated to `m`'s depth must simulate `m`
/// in the requested sense. The hierarchical mode requires both models to
/// be hierarchical.
pub fn refines(
    m: &LayeredModel,
    n: &LayeredModel,
    kind: FamilyKind,
) -> Result<SimVerdict, EquivError> {
    side_valid(m, "left")?;
    side_valid(n, "right")?;
    if m.depth() > n.depth() {
        return Err(EquivError::SignatureMismatch);
    }
    if &n.sig().restrict(m.depth()).map_err(ModelError::from)? != m.sig() {
        return Err(EquivError::SignatureMismatch);
    }
    if kind == FamilyKind::Hierarchical {
        require_hierarchical(m, "left")?;
        require_hierarchical(n, "right")?;
    }
    let truncated = n.restrict(m.depth())?;
    match kind {
        FamilyKind::Layered => l_simulates(m, &truncated),
        FamilyKind::Hierarchical => h_simulates(m, &truncated),
    }
}
