//! Translation into many-sorted first-order logic, an evaluator for the
//! resulting formulas, and SMT-LIB output.
//!
//! A depth-`n` signature becomes sorts `S0..Sn` with one domain predicate
//! `Dk` (arity `S0..Sk`) and one relation predicate `Rk` (that arity
//! doubled) per level, a predicate per proposition taking a full
//! level-`k` point, and a constant per nominal. A level-`k` point is a
//! variable vector `x0..xk`; subformulas below the evaluation level only
//! ever look at the matching prefix, so the translation drops the unused
//! tail instead of threading it through.
//!
//! [`eval_fol`] knows nothing about the modal side: it is a plain
//! assignment-based evaluator over finite carriers, which makes it an
//! independent check on [`satisfies`](crate::semantics::satisfies).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::model::{LayeredModel, ModelError};
use crate::signature::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FolError {
    #[error("name {name} is reserved for the translation")]
    ReservedName { name: String },
    #[error("expected {expected} point variables, got {got}")]
    WrongVarCount { expected: usize, got: usize },
    #[error("level-{formula} formula cannot be translated at level {level}")]
    LevelMismatch { formula: usize, level: usize },
    #[error("unknown predicate {name}")]
    UnknownPred { name: String },
    #[error("unknown constant {name}")]
    UnknownConst { name: String },
    #[error("variable {name} is unbound")]
    UnboundVar { name: String },
    #[error("predicate {name} expects {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A sorted first-order variable; `sort` indexes into the sort list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FolVar {
    pub name: String,
    pub sort: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FolTerm {
    Var(FolVar),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolFormula {
    Pred { name: String, args: Vec<FolTerm> },
    Eq(FolTerm, FolTerm),
    Not(Box<FolFormula>),
    And(Box<FolFormula>, Box<FolFormula>),
    Exists(Vec<FolVar>, Box<FolFormula>),
}

/// Sorts `S0..Sn`, predicate arities (as sort indices), constant sorts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolSignature {
    pub sorts: Vec<String>,
    pub preds: BTreeMap<String, Vec<usize>>,
    pub consts: BTreeMap<String, usize>,
}

/// A finite first-order structure: one carrier per sort, an element per
/// constant, a tuple set per predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolModel {
    pub sig: FolSignature,
    pub carriers: Vec<BTreeSet<String>>,
    pub consts: BTreeMap<String, String>,
    pub preds: BTreeMap<String, BTreeSet<Vec<String>>>,
}

/// `Dk`, `Rk` and `Sk` are generated by the translation, so user symbols
/// matching those patterns would collide.
fn is_reserved(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('D' | 'R' | 'S'))
        && name.len() > 1
        && chars.all(|c| c.is_ascii_digit())
}

pub fn translate_signature(sig: &Signature) -> Result<FolSignature, FolError> {
    let depth = sig.depth();
    let mut preds = BTreeMap::new();
    let mut consts = BTreeMap::new();
    for k in 0..=depth {
        let point: Vec<usize> = (0..=k).collect();
        let mut pair = point.clone();
        pair.extend(&point);
        preds.insert(format!("D{k}"), point.clone());
        preds.insert(format!("R{k}"), pair);
        for p in sig.props_at(k) {
            if is_reserved(p) {
                return Err(FolError::ReservedName { name: p.clone() });
            }
            preds.insert(p.clone(), point.clone());
        }
        for i in sig.noms_at(k) {
            if is_reserved(i) {
                return Err(FolError::ReservedName { name: i.clone() });
            }
            consts.insert(i.clone(), k);
        }
    }
    Ok(FolSignature {
        sorts: (0..=depth).map(|k| format!("S{k}")).collect(),
        preds,
        consts,
    })
}

pub fn translate_model(model: &LayeredModel) -> Result<FolModel, FolError> {
    model.require_valid()?;
    let sig = translate_signature(model.sig())?;
    let depth = model.depth();
    let carriers: Vec<BTreeSet<String>> = (0..=depth).map(|k| model.worlds_at(k).clone()).collect();
    let mut preds: BTreeMap<String, BTreeSet<Vec<String>>> = BTreeMap::new();
    for k in 0..=depth {
        preds.insert(
            format!("D{k}"),
            model
                .domain_at(k)
                .iter()
                .map(|t| t.ids().to_vec())
                .collect(),
        );
        preds.insert(
            format!("R{k}"),
            model
                .rel_at(k)
                .iter()
                .map(|(s, t)| {
                    let mut row = s.ids().to_vec();
                    row.extend_from_slice(t.ids());
                    row
                })
                .collect(),
        );
        for p in model.sig().props_at(k) {
            preds.insert(p.clone(), BTreeSet::new());
        }
    }
    for ((p, prefix), vals) in model.propval() {
        let rows = preds.get_mut(p).expect("valid model props are declared");
        for w in vals {
            let mut row = prefix.ids().to_vec();
            row.push(w.clone());
            rows.insert(row);
        }
    }
    Ok(FolModel {
        sig,
        carriers,
        consts: model.nomval().clone(),
        preds,
    })
}

/// The point variables `x0..xk` of a level-`k` evaluation.
pub fn point_vars(k: usize) -> Vec<FolVar> {
    (0..=k)
        .map(|r| FolVar {
            name: format!("x{r}"),
            sort: r,
        })
        .collect()
}

/// Translates `f` as evaluated at a level-`k` point named by `vars`
/// (length `k + 1`). Free variables of the result are a prefix of `vars`;
/// bound variables `y{component}_{counter}` are numbered in pre-order.
pub fn standard_translation(
    f: &Formula,
    k: usize,
    vars: &[FolVar],
) -> Result<FolFormula, FolError> {
    if vars.len() != k + 1 {
        return Err(FolError::WrongVarCount {
            expected: k + 1,
            got: vars.len(),
        });
    }
    if f.level() > k {
        return Err(FolError::LevelMismatch {
            formula: f.level(),
            level: k,
        });
    }
    let terms: Vec<FolTerm> = vars.iter().cloned().map(FolTerm::Var).collect();
    let mut counter = 0;
    Ok(st(f, &terms[..=f.level()], &mut counter))
}

/// Core translation; `terms` names the level-`level(f)` evaluation point.
fn st(f: &Formula, terms: &[FolTerm], counter: &mut usize) -> FolFormula {
    debug_assert_eq!(terms.len(), f.level() + 1);
    match f {
        Formula::Nom(a) => FolFormula::Eq(FolTerm::Const(a.name.clone()), terms[a.level].clone()),
        Formula::Prop(a) => FolFormula::Pred {
            name: a.name.clone(),
            args: terms.to_vec(),
        },
        Formula::Neg(c) => FolFormula::Not(Box::new(st(c, &terms[..=c.level()], counter))),
        Formula::And(a, b) => FolFormula::And(
            Box::new(st(a, &terms[..=a.level()], counter)),
            Box::new(st(b, &terms[..=b.level()], counter)),
        ),
        Formula::At(i, c) => {
            let mut jumped = terms[..i.level].to_vec();
            jumped.push(FolTerm::Const(i.name.clone()));
            let guard = FolFormula::Pred {
                name: format!("D{}", i.level),
                args: jumped.clone(),
            };
            let body = st(c, &jumped[..=c.level()], counter);
            FolFormula::And(Box::new(guard), Box::new(body))
        }
        Formula::Diamond(l, c) => {
            let id = *counter;
            *counter += 1;
            let yvars: Vec<FolVar> = (0..=*l)
                .map(|r| FolVar {
                    name: format!("y{r}_{id}"),
                    sort: r,
                })
                .collect();
            let yterms: Vec<FolTerm> = yvars.iter().cloned().map(FolTerm::Var).collect();
            let mut args = terms.to_vec();
            args.extend(yterms.iter().cloned());
            let step = FolFormula::Pred {
                name: format!("R{l}"),
                args,
            };
            let body = st(c, &yterms[..=c.level()], counter);
            FolFormula::Exists(
                yvars,
                Box::new(FolFormula::And(Box::new(step), Box::new(body))),
            )
        }
    }
}

fn term_value(
    model: &FolModel,
    env: &BTreeMap<String, String>,
    t: &FolTerm,
) -> Result<String, FolError> {
    match t {
        FolTerm::Var(v) => env
            .get(&v.name)
            .cloned()
            .ok_or_else(|| FolError::UnboundVar {
                name: v.name.clone(),
            }),
        FolTerm::Const(c) => model
            .consts
            .get(c)
            .cloned()
            .ok_or_else(|| FolError::UnknownConst { name: c.clone() }),
    }
}

/// Evaluates a first-order formula in a finite structure under an
/// assignment of elements to variable names.
pub fn eval_fol(
    model: &FolModel,
    assignment: &BTreeMap<String, String>,
    f: &FolFormula,
) -> Result<bool, FolError> {
    let mut env = assignment.clone();
    eval(model, &mut env, f)
}

fn eval(
    model: &FolModel,
    env: &mut BTreeMap<String, String>,
    f: &FolFormula,
) -> Result<bool, FolError> {
    match f {
        FolFormula::Pred { name, args } => {
            let arity = model
                .sig
                .preds
                .get(name)
                .ok_or_else(|| FolError::UnknownPred { name: name.clone() })?
                .len();
            if args.len() != arity {
                return Err(FolError::ArityMismatch {
                    name: name.clone(),
                    expected: arity,
                    got: args.len(),
                });
            }
            let row = args
                .iter()
                .map(|t| term_value(model, env, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(model.preds.get(name).is_some_and(|set| set.contains(&row)))
        }
        FolFormula::Eq(l, r) => Ok(term_value(model, env, l)? == term_value(model, env, r)?),
        FolFormula::Not(c) => Ok(!eval(model, env, c)?),
        FolFormula::And(a, b) => Ok(eval(model, env, a)? && eval(model, env, b)?),
        FolFormula::Exists(vars, body) => eval_exists(model, env, vars, body),
    }
}

fn eval_exists(
    model: &FolModel,
    env: &mut BTreeMap<String, String>,
    vars: &[FolVar],
    body: &FolFormula,
) -> Result<bool, FolError> {
    let Some((v, rest)) = vars.split_first() else {
        return eval(model, env, body);
    };
    let elems: Vec<String> = model.carriers[v.sort].iter().cloned().collect();
    for e in elems {
        let saved = env.insert(v.name.clone(), e);
        let found = eval_exists(model, env, rest, body)?;
        match saved {
            Some(old) => {
                env.insert(v.name.clone(), old);
            }
            None => {
                env.remove(&v.name);
            }
        }
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Free variables of a formula, ordered by sort then name.
pub fn free_vars(f: &FolFormula) -> BTreeSet<FolVar> {
    fn go(f: &FolFormula, bound: &mut Vec<String>, out: &mut BTreeSet<FolVar>) {
        match f {
            FolFormula::Pred { args, .. } => {
                for t in args {
                    if let FolTerm::Var(v) = t {
                        if !bound.contains(&v.name) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            FolFormula::Eq(l, r) => {
                for t in [l, r] {
                    if let FolTerm::Var(v) = t {
                        if !bound.contains(&v.name) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            FolFormula::Not(c) => go(c, bound, out),
            FolFormula::And(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            FolFormula::Exists(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().map(|v| v.name.clone()));
                go(body, bound, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out);
    let mut sorted: Vec<FolVar> = out.into_iter().collect();
    sorted.sort_by(|a, b| a.sort.cmp(&b.sort).then_with(|| a.name.cmp(&b.name)));
    sorted.into_iter().collect()
}

impl fmt::Display for FolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolTerm::Var(v) => write!(f, "{}", v.name),
            FolTerm::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for FolFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &FolFormula) -> String {
            match f {
                FolFormula::And(_, _) | FolFormula::Exists(_, _) => format!("({f})"),
                _ => f.to_string(),
            }
        }
        match self {
            FolFormula::Pred { name, args } => {
                let args: Vec<String> = args.iter().map(|t| t.to_string()).collect();
                write!(out, "{name}({})", args.join(", "))
            }
            FolFormula::Eq(l, r) => write!(out, "({l} = {r})"),
            FolFormula::Not(c) => write!(out, "¬{}", wrap(c)),
            FolFormula::And(a, b) => write!(out, "{} ∧ {}", wrap(a), wrap(b)),
            FolFormula::Exists(vars, body) => {
                let vs: Vec<String> = vars
                    .iter()
                    .map(|v| format!("{}:S{}", v.name, v.sort))
                    .collect();
                write!(out, "∃{} ({body})", vs.join(", "))
            }
        }
    }
}

/// A symbol in SMT-LIB syntax; names starting with a digit need quoting.
fn sym(name: &str) -> String {
    if name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

fn smt(f: &FolFormula) -> String {
    match f {
        FolFormula::Pred { name, args } => {
            let args: Vec<String> = args.iter().map(smt_term).collect();
            format!("({} {})", sym(name), args.join(" "))
        }
        FolFormula::Eq(l, r) => format!("(= {} {})", smt_term(l), smt_term(r)),
        FolFormula::Not(c) => format!("(not {})", smt(c)),
        FolFormula::And(a, b) => format!("(and {} {})", smt(a), smt(b)),
        FolFormula::Exists(vars, body) => {
            let vs: Vec<String> = vars
                .iter()
                .map(|v| format!("({} S{})", v.name, v.sort))
                .collect();
            format!("(exists ({}) {})", vs.join(" "), smt(body))
        }
    }
}

fn smt_term(t: &FolTerm) -> String {
    match t {
        FolTerm::Var(v) => v.name.clone(),
        FolTerm::Const(c) => sym(c),
    }
}

/// Renders an SMT-LIB problem: sort and symbol declarations, optionally a
/// complete axiomatization of a finite structure (distinct elements, a
/// domain-closure axiom per sort, a defining equivalence per predicate),
/// and the sentence, universally closed over its free variables.
///
/// Carrier elements are declared as fresh constants; an element whose name
/// collides with a constant, predicate, sort, or an element of another
/// sort is declared as `name@Sk` instead.
pub fn export_smtlib(
    fsig: &FolSignature,
    sentence: &FolFormula,
    model: Option<&FolModel>,
) -> Result<String, FolError> {
    let mut out = String::new();
    for s in &fsig.sorts {
        out.push_str(&format!("(declare-sort {s} 0)\n"));
    }
    for (name, sorts) in &fsig.preds {
        let args: Vec<String> = sorts.iter().map(|r| format!("S{r}")).collect();
        out.push_str(&format!(
            "(declare-fun {} ({}) Bool)\n",
            sym(name),
            args.join(" ")
        ));
    }
    for (name, sort) in &fsig.consts {
        out.push_str(&format!("(declare-const {} S{sort})\n", sym(name)));
    }
    if let Some(m) = model {
        let mut taken: BTreeSet<&str> = fsig.consts.keys().map(String::as_str).collect();
        taken.extend(fsig.preds.keys().map(String::as_str));
        taken.extend(fsig.sorts.iter().map(String::as_str));
        let mut seen_in: BTreeMap<&str, usize> = BTreeMap::new();
        for carrier in &m.carriers {
            for e in carrier {
                *seen_in.entry(e).or_insert(0) += 1;
            }
        }
        let rename = |e: &str, sort: usize| -> String {
            if taken.contains(e) || seen_in.get(e).copied().unwrap_or(0) > 1 {
                format!("{e}@S{sort}")
            } else {
                e.to_string()
            }
        };
        for (sort, carrier) in m.carriers.iter().enumerate() {
            let elems: Vec<String> = carrier.iter().map(|e| sym(&rename(e, sort))).collect();
            for e in &elems {
                out.push_str(&format!("(declare-const {e} S{sort})\n"));
            }
            if elems.len() > 1 {
                out.push_str(&format!("(assert (distinct {}))\n", elems.join(" ")));
            }
            if !elems.is_empty() {
                let eqs: Vec<String> = elems.iter().map(|e| format!("(= z {e})")).collect();
                let body = if eqs.len() == 1 {
                    eqs[0].clone()
                } else {
                    format!("(or {})", eqs.join(" "))
                };
                out.push_str(&format!("(assert (forall ((z S{sort})) {body}))\n"));
            }
        }
        for (name, elem) in &m.consts {
            let sort = *fsig
                .consts
                .get(name)
                .ok_or_else(|| FolError::UnknownConst { name: name.clone() })?;
            out.push_str(&format!(
                "(assert (= {} {}))\n",
                sym(name),
                sym(&rename(elem, sort))
            ));
        }
        for (name, sorts) in &fsig.preds {
            let vars: Vec<String> = (0..sorts.len()).map(|i| format!("v{i}")).collect();
            let binders: Vec<String> = vars
                .iter()
                .zip(sorts)
                .map(|(v, s)| format!("({v} S{s})"))
                .collect();
            let rows: Vec<String> = m
                .preds
                .get(name)
                .map(|set| {
                    set.iter()
                        .map(|row| {
                            let eqs: Vec<String> = row
                                .iter()
                                .zip(&vars)
                                .zip(sorts)
                                .map(|((e, v), s)| format!("(= {v} {})", sym(&rename(e, *s))))
                                .collect();
                            if eqs.len() == 1 {
                                eqs[0].clone()
                            } else {
                                format!("(and {})", eqs.join(" "))
                            }
                        })
                        .collect()
                })
                .unwrap_or_default();
            let body = match rows.len() {
                0 => "false".to_string(),
                1 => rows[0].clone(),
                _ => format!("(or {})", rows.join(" ")),
            };
            out.push_str(&format!(
                "(assert (forall ({}) (= ({} {}) {body})))\n",
                binders.join(" "),
                sym(name),
                vars.join(" ")
            ));
        }
    }
    let frees: Vec<FolVar> = free_vars(sentence).into_iter().collect();
    let rendered = smt(sentence);
    if frees.is_empty() {
        out.push_str(&format!("(assert {rendered})\n"));
    } else {
        let binders: Vec<String> = frees
            .iter()
            .map(|v| format!("({} S{})", v.name, v.sort))
            .collect();
        out.push_str(&format!(
            "(assert (forall ({}) {rendered}))\n",
            binders.join(" ")
        ));
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testmodel::t1;
    use crate::model::WorldTuple;
    use crate::semantics::satisfies;
    use crate::signature::testsig;

    fn translate(src: &str, sig: &Signature, k: usize) -> FolFormula {
        let f = Formula::parse(src, sig).unwrap();
        standard_translation(&f, k, &point_vars(k)).unwrap()
    }

    #[test]
    fn signature_translation_shapes() {
        let fs = translate_signature(&testsig::t1()).unwrap();
        assert_eq!(fs.sorts, vec!["S0", "S1"]);
        assert_eq!(fs.preds["D0"], vec![0]);
        assert_eq!(fs.preds["D1"], vec![0, 1]);
        assert_eq!(fs.preds["R1"], vec![0, 1, 0, 1]);
        assert_eq!(fs.consts["na"], 0);
        assert_eq!(fs.consts["ny"], 1);

        let fs = translate_signature(&testsig::strongbox()).unwrap();
        assert_eq!(fs.preds["safe_state"], vec![0]);
        assert_eq!(fs.preds["timed_state"], vec![0, 1]);
    }

    #[test]
    fn reserved_names_are_rejected() {
        let sig = testsig::sig(0, &[&["D0"]], &[&[]]);
        assert_eq!(
            translate_signature(&sig),
            Err(FolError::ReservedName { name: "D0".into() })
        );
    }

    #[test]
    fn jump_translation_matches_the_worked_example() {
        let st = translate("@idle closed", &testsig::strongbox(), 1);
        assert_eq!(st.to_string(), "D1(x0, idle) ∧ (closed = x0)");
    }

    #[test]
    fn lower_level_formulas_ignore_the_variable_tail() {
        let sig = testsig::strongbox();
        assert_eq!(translate("closed", &sig, 0).to_string(), "(closed = x0)");
        assert_eq!(translate("closed", &sig, 2).to_string(), "(closed = x0)");
        assert_eq!(
            translate("safe_state & closed", &sig, 2).to_string(),
            "safe_state(x0) ∧ (closed = x0)"
        );
    }

    #[test]
    fn diamonds_quantify_fresh_chain_variables_in_preorder() {
        let sig = testsig::t1();
        assert_eq!(
            translate("<1> ny", &sig, 1).to_string(),
            "∃y0_0:S0, y1_0:S1 (R1(x0, x1, y0_0, y1_0) ∧ (ny = y1_0))"
        );
        assert_eq!(
            translate("<0> na & <0> !na", &sig, 0).to_string(),
            "(∃y0_0:S0 (R0(x0, y0_0) ∧ (na = y0_0))) ∧ \
             (∃y0_1:S0 (R0(x0, y0_1) ∧ ¬(na = y0_1)))"
        );
        assert_eq!(
            translate("<1> <1> ny", &sig, 1).to_string(),
            "∃y0_0:S0, y1_0:S1 (R1(x0, x1, y0_0, y1_0) ∧ \
             (∃y0_1:S0, y1_1:S1 (R1(y0_0, y1_0, y0_1, y1_1) ∧ (ny = y1_1))))"
        );
    }

    #[test]
    fn translated_formulas_agree_with_direct_evaluation() {
        let m = t1();
        let fm = translate_model(&m).unwrap();
        for (src, k) in [("<0> !na", 0), ("na", 0), ("<1> ny", 1), ("@nx na", 1)] {
            let f = Formula::parse(src, m.sig()).unwrap();
            let st = standard_translation(&f, k, &point_vars(k)).unwrap();
            for point in m.domain_at(k) {
                let env: BTreeMap<String, String> = point_vars(k)
                    .iter()
                    .zip(point.ids())
                    .map(|(v, w)| (v.name.clone(), w.clone()))
                    .collect();
                assert_eq!(
                    eval_fol(&fm, &env, &st).unwrap(),
                    satisfies(&m, point, &f).unwrap(),
                    "{src} at {point}"
                );
            }
        }
    }

    #[test]
    fn evaluation_errors() {
        let fm = translate_model(&t1()).unwrap();
        let x0 = FolTerm::Var(FolVar {
            name: "x0".into(),
            sort: 0,
        });
        assert_eq!(
            eval_fol(
                &fm,
                &BTreeMap::new(),
                &FolFormula::Eq(x0.clone(), x0.clone())
            ),
            Err(FolError::UnboundVar { name: "x0".into() })
        );
        let env = BTreeMap::from([("x0".to_string(), "a".to_string())]);
        assert_eq!(
            eval_fol(
                &fm,
                &env,
                &FolFormula::Eq(FolTerm::Const("zz".into()), x0.clone())
            ),
            Err(FolError::UnknownConst { name: "zz".into() })
        );
        assert_eq!(
            eval_fol(
                &fm,
                &env,
                &FolFormula::Pred {
                    name: "D1".into(),
                    args: vec![x0.clone()]
                }
            ),
            Err(FolError::ArityMismatch {
                name: "D1".into(),
                expected: 2,
                got: 1
            })
        );
        assert_eq!(
            eval_fol(
                &fm,
                &env,
                &FolFormula::Pred {
                    name: "Q".into(),
                    args: vec![x0]
                }
            ),
            Err(FolError::UnknownPred { name: "Q".into() })
        );
    }

    #[test]
    fn smtlib_export_axiomatizes_the_structure() {
        let m = t1();
        let fm = translate_model(&m).unwrap();
        let f = Formula::parse("na | !na", m.sig()).unwrap();
        let st = standard_translation(&f, 0, &point_vars(0)).unwrap();
        let text = export_smtlib(&fm.sig, &st, Some(&fm)).unwrap();
        assert!(text.starts_with("(declare-sort S0 0)\n(declare-sort S1 0)\n"));
        assert!(text.contains("(declare-fun R1 (S0 S1 S0 S1) Bool)\n"));
        assert!(text.contains("(assert (distinct a b))\n"));
        assert!(text.contains("(assert (distinct x y))\n"));
        assert!(text.contains("(assert (forall ((z S0)) (or (= z a) (= z b))))\n"));
        assert!(text.contains("(assert (= na a))\n"));
        assert!(text.contains(
            "(assert (forall ((v0 S0) (v1 S1) (v2 S0) (v3 S1)) \
             (= (R1 v0 v1 v2 v3) (and (= v0 a) (= v1 x) (= v2 b) (= v3 y)))))\n"
        ));
        assert!(text.contains("(assert (forall ((x0 S0))"));
        assert!(text.trim_end().ends_with("(check-sat)"));
    }

    #[test]
    fn colliding_element_names_are_suffixed() {
        let sig = testsig::sig(0, &[&[]], &[&["n"]]);
        let m = LayeredModel::new(
            sig,
            vec![["n".to_string()].into_iter().collect()],
            [WorldTuple::of(&["n"])].into_iter().collect(),
            vec![BTreeSet::new()],
            BTreeMap::new(),
            BTreeMap::from([("n".to_string(), "n".to_string())]),
        )
        .unwrap();
        let fm = translate_model(&m).unwrap();
        let st = FolFormula::Eq(
            FolTerm::Const("n".into()),
            FolTerm::Var(FolVar {
                name: "x0".into(),
                sort: 0,
            }),
        );
        let text = export_smtlib(&fm.sig, &st, Some(&fm)).unwrap();
        assert!(text.contains("(declare-const n S0)\n"));
        assert!(text.contains("(declare-const n@S0 S0)\n"));
        assert!(text.contains("(assert (= n n@S0))\n"));
    }
}
