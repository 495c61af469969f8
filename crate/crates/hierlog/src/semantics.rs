//! Satisfaction of formulas at domain chains.
//!
//! Evaluation is by labelling: each subformula `g` gets the full set of
//! level-`level(g)` chains satisfying it, computed bottom up, and outer
//! nodes consult those sets through prefix truncation. A level-`k` point
//! satisfies a lower-level formula exactly when its prefix does, so the
//! labelling also answers queries at any level at or above the formula's.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{Formula, ParseError};
use crate::model::{LayeredModel, ModelError, WorldTuple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("point {point} is outside the level-{level} domain")]
    PointOutsideDomain { point: WorldTuple, level: usize },
    #[error("level-{formula} formula cannot be evaluated at a level-{point} point")]
    LevelMismatch { formula: usize, point: usize },
    #[error("level {level} out of range (max {max})")]
    LevelOutOfRange { level: usize, max: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed formula: {0}")]
    Formula(#[from] ParseError),
}

/// Whether `point` satisfies `f`. The evaluation level is the point's own
/// level, which must be at or above the formula's.
pub fn satisfies(
    model: &LayeredModel,
    point: &WorldTuple,
    f: &Formula,
) -> Result<bool, SemanticsError> {
    let (set, jf) = checked_sat(model, f, || {
        if point.is_empty() {
            return Err(SemanticsError::PointOutsideDomain {
                point: point.clone(),
                level: 0,
            });
        }
        let k = point.level();
        if k > model.depth() {
            return Err(SemanticsError::LevelOutOfRange {
                level: k,
                max: model.depth(),
            });
        }
        if !model.domain_at(k).contains(point) {
            return Err(SemanticsError::PointOutsideDomain {
                point: point.clone(),
                level: k,
            });
        }
        Ok(k)
    })?;
    Ok(set.contains(&point.restrict(jf)))
}

/// All level-`k` chains satisfying `f`.
pub fn satisfying_points(
    model: &LayeredModel,
    f: &Formula,
    k: usize,
) -> Result<BTreeSet<WorldTuple>, SemanticsError> {
    let (set, jf) = checked_sat(model, f, || {
        if k > model.depth() {
            return Err(SemanticsError::LevelOutOfRange {
                level: k,
                max: model.depth(),
            });
        }
        Ok(k)
    })?;
    Ok(model
        .domain_at(k)
        .iter()
        .filter(|u| set.contains(&u.restrict(jf)))
        .cloned()
        .collect())
}

/// Whether every level-`k` chain satisfies `f`.
pub fn valid_in_model(model: &LayeredModel, f: &Formula, k: usize) -> Result<bool, SemanticsError> {
    Ok(&satisfying_points(model, f, k)? == model.domain_at(k))
}

/// Shared validation: model valid, formula well formed, evaluation level
/// in range and at or above the formula level; then label.
fn checked_sat(
    model: &LayeredModel,
    f: &Formula,
    level: impl FnOnce() -> Result<usize, SemanticsError>,
) -> Result<(BTreeSet<WorldTuple>, usize), SemanticsError> {
    model.require_valid()?;
    f.check(model.sig())?;
    let k = level()?;
    let jf = f.level();
    if jf > k {
        return Err(SemanticsError::LevelMismatch {
            formula: jf,
            point: k,
        });
    }
    Ok((sat(model, f), jf))
}

/// The set of level-`level(f)` chains satisfying `f`. Assumes the model is
/// valid and `f` checks against its signature.
fn sat(model: &LayeredModel, f: &Formula) -> BTreeSet<WorldTuple> {
    match f {
        Formula::Nom(a) => {
            let w = model
                .nominal_world(&a.name)
                .expect("valid model names every nominal");
            model
                .domain_at(a.level)
                .iter()
                .filter(|u| u.last() == w)
                .cloned()
                .collect()
        }
        Formula::Prop(a) => model
            .domain_at(a.level)
            .iter()
            .filter(|u| model.prop_contains(&a.name, u))
            .cloned()
            .collect(),
        Formula::Neg(c) => {
            let sc = sat(model, c);
            model
                .domain_at(c.level())
                .difference(&sc)
                .cloned()
                .collect()
        }
        Formula::And(a, b) => {
            let (sa, sb) = (sat(model, a), sat(model, b));
            let (ja, jb) = (a.level(), b.level());
            model
                .domain_at(ja.max(jb))
                .iter()
                .filter(|u| sa.contains(&u.restrict(ja)) && sb.contains(&u.restrict(jb)))
                .cloned()
                .collect()
        }
        Formula::At(i, c) => {
            let sc = sat(model, c);
            let jc = c.level();
            let w = model
                .nominal_world(&i.name)
                .expect("valid model names every nominal");
            model
                .domain_at(i.level)
                .iter()
                .filter(|u| {
                    // Jump to the sibling chain naming i; a missing target
                    // chain makes the formula false, not an error.
                    let target = u.take(i.level).pushed(w);
                    model.domain_at(i.level).contains(&target) && sc.contains(&target.restrict(jc))
                })
                .cloned()
                .collect()
        }
        Formula::Diamond(l, c) => {
            let sc = sat(model, c);
            let jc = c.level();
            model
                .rel_at(*l)
                .iter()
                .filter(|(_, t)| sc.contains(&t.restrict(jc)))
                .map(|(s, _)| s.clone())
                .collect()
        }
    }
}
