//! Shared fixture loading and random generators for integration tests.
//!
//! Generated models are valid by construction: worlds are read off the
//! domain chains, so the projection invariants cannot fail, and
//! relations only ever connect chains from the model's own domain.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use hierlog::model::TuplePair;
use hierlog::{Formula, LayeredModel, ModelDocument, Signature, WorldTuple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load_fixture(name: &str) -> LayeredModel {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    let doc: ModelDocument = serde_json::from_str(&text).unwrap();
    doc.into_model().unwrap()
}

/// Random signature with at least one nominal per level, so formulas
/// and nominal valuations always have something to refer to.
pub fn gen_signature(rng: &mut ChaCha8Rng, max_depth: usize) -> Signature {
    let depth = rng.gen_range(0..=max_depth);
    let mut props: Vec<BTreeSet<String>> = Vec::new();
    let mut noms: Vec<BTreeSet<String>> = Vec::new();
    for k in 0..=depth {
        let np = rng.gen_range(0..=2);
        let nn = rng.gen_range(1..=2);
        props.push((0..np).map(|i| format!("p{k}_{i}")).collect());
        noms.push((0..nn).map(|i| format!("n{k}_{i}")).collect());
    }
    Signature::new(depth, props, noms).unwrap()
}

fn product(pools: &[Vec<String>]) -> Vec<WorldTuple> {
    let mut chains = vec![Vec::new()];
    for pool in pools {
        chains = chains
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                pool.iter().map(move |w| {
                    let mut c = prefix.clone();
                    c.push(w.clone());
                    c
                })
            })
            .collect();
    }
    chains.into_iter().map(WorldTuple::new).collect()
}

/// Random valid model over `sig`. With `hierarchical` the relations are
/// the projections of a single top-level relation, which satisfies the
/// projection equations by construction; otherwise each level is drawn
/// independently.
pub fn gen_model(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    max_per_level: usize,
    max_chains: usize,
    hierarchical: bool,
) -> LayeredModel {
    let depth = sig.depth();
    let pools: Vec<Vec<String>> = (0..=depth)
        .map(|k| {
            let n = rng.gen_range(1..=max_per_level);
            (0..n).map(|i| format!("w{k}_{i}")).collect()
        })
        .collect();
    let mut candidates = product(&pools);
    candidates.shuffle(rng);
    let take = rng.gen_range(1..=candidates.len().min(max_chains));
    let domain: BTreeSet<WorldTuple> = candidates.into_iter().take(take).collect();

    let worlds: Vec<BTreeSet<String>> = (0..=depth)
        .map(|k| domain.iter().map(|t| t.ids()[k].clone()).collect())
        .collect();
    let domain_at = |k: usize| -> Vec<WorldTuple> {
        let set: BTreeSet<WorldTuple> = domain.iter().map(|t| t.restrict(k)).collect();
        set.into_iter().collect()
    };

    let rels: Vec<BTreeSet<TuplePair>> = if hierarchical {
        let top = domain_at(depth);
        let mut rn: BTreeSet<TuplePair> = BTreeSet::new();
        for s in &top {
            for t in &top {
                if rng.gen_bool(0.25) {
                    rn.insert((s.clone(), t.clone()));
                }
            }
        }
        (0..=depth)
            .map(|k| {
                rn.iter()
                    .map(|(s, t)| (s.restrict(k), t.restrict(k)))
                    .collect()
            })
            .collect()
    } else {
        (0..=depth)
            .map(|k| {
                let dk = domain_at(k);
                let mut rk = BTreeSet::new();
                for s in &dk {
                    for t in &dk {
                        if rng.gen_bool(0.25) {
                            rk.insert((s.clone(), t.clone()));
                        }
                    }
                }
                rk
            })
            .collect()
    };

    let mut propval: BTreeMap<(String, WorldTuple), BTreeSet<String>> = BTreeMap::new();
    for (k, level_worlds) in worlds.iter().enumerate() {
        let prefixes: Vec<WorldTuple> = if k == 0 {
            vec![WorldTuple::new(Vec::new())]
        } else {
            domain_at(k - 1)
        };
        for prop in sig.props_at(k) {
            for prefix in &prefixes {
                if rng.gen_bool(0.6) {
                    let members: BTreeSet<String> = level_worlds
                        .iter()
                        .filter(|_| rng.gen_bool(0.4))
                        .cloned()
                        .collect();
                    if !members.is_empty() {
                        propval.insert((prop.clone(), prefix.clone()), members);
                    }
                }
            }
        }
    }

    let mut nomval = BTreeMap::new();
    for (k, level_worlds) in worlds.iter().enumerate() {
        let pool: Vec<&String> = level_worlds.iter().collect();
        for nom in sig.noms_at(k) {
            nomval.insert(nom.clone(), (*pool.choose(rng).unwrap()).clone());
        }
    }

    let m = LayeredModel::new(sig.clone(), worlds, domain, rels, propval, nomval).unwrap();
    assert!(m.is_valid(), "generator produced an invalid model");
    m
}

/// Two models over one signature, as bisimulation tests need them.
pub fn gen_model_pair(
    rng: &mut ChaCha8Rng,
    max_depth: usize,
    max_per_level: usize,
    max_chains: usize,
    hierarchical: bool,
) -> (LayeredModel, LayeredModel) {
    let sig = gen_signature(rng, max_depth);
    let a = gen_model(rng, &sig, max_per_level, max_chains, hierarchical);
    let b = gen_model(rng, &sig, max_per_level, max_chains, hierarchical);
    (a, b)
}

fn atoms_up_to(sig: &Signature, cap: usize) -> Vec<(String, usize, bool)> {
    let mut out = Vec::new();
    for k in 0..=cap.min(sig.depth()) {
        for p in sig.props_at(k) {
            out.push((p.clone(), k, true));
        }
        for n in sig.noms_at(k) {
            out.push((n.clone(), k, false));
        }
    }
    out
}

fn leaf(rng: &mut ChaCha8Rng, sig: &Signature, cap: usize) -> Formula {
    let pool = atoms_up_to(sig, cap);
    let (name, level, is_prop) = pool.choose(rng).expect("no atoms below cap");
    if *is_prop {
        Formula::prop(name, *level)
    } else {
        Formula::nom(name, *level)
    }
}

/// Random formula with level at most `cap`; `positive` disables negation.
pub fn gen_formula(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    cap: usize,
    budget: usize,
    positive: bool,
) -> Formula {
    if budget == 0 || rng.gen_bool(0.35) {
        return leaf(rng, sig, cap);
    }
    let choices = if positive { 3 } else { 4 };
    match rng.gen_range(0..choices) {
        0 => Formula::and(
            gen_formula(rng, sig, cap, budget - 1, positive),
            gen_formula(rng, sig, cap, budget - 1, positive),
        ),
        1 => {
            let j = rng.gen_range(0..=cap);
            let noms: Vec<&String> = sig.noms_at(j).iter().collect();
            match noms.choose(rng) {
                Some(nom) => Formula::at(nom, j, gen_formula(rng, sig, j, budget - 1, positive)),
                None => leaf(rng, sig, cap),
            }
        }
        2 => {
            let l = rng.gen_range(0..=cap);
            Formula::diamond(l, gen_formula(rng, sig, l, budget - 1, positive))
        }
        _ => Formula::negate(gen_formula(rng, sig, cap, budget - 1, positive)),
    }
}

/// Random formula whose atoms and operator indices all sit at level `k`
/// exactly; `None` when the signature has no level-`k` symbols.
pub fn gen_strict_formula(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    k: usize,
    budget: usize,
    positive: bool,
) -> Option<Formula> {
    let props: Vec<&String> = sig.props_at(k).iter().collect();
    let noms: Vec<&String> = sig.noms_at(k).iter().collect();
    if props.is_empty() && noms.is_empty() {
        return None;
    }
    let leaf = |rng: &mut ChaCha8Rng| {
        let total = props.len() + noms.len();
        let i = rng.gen_range(0..total);
        if i < props.len() {
            Formula::prop(props[i], k)
        } else {
            Formula::nom(noms[i - props.len()], k)
        }
    };
    if budget == 0 || rng.gen_bool(0.35) {
        return Some(leaf(rng));
    }
    let choices = if positive { 3 } else { 4 };
    Some(match rng.gen_range(0..choices) {
        0 => Formula::and(
            gen_strict_formula(rng, sig, k, budget - 1, positive)?,
            gen_strict_formula(rng, sig, k, budget - 1, positive)?,
        ),
        1 => match noms.choose(rng) {
            Some(nom) => Formula::at(
                nom,
                k,
                gen_strict_formula(rng, sig, k, budget - 1, positive)?,
            ),
            None => leaf(rng),
        },
        2 => Formula::diamond(k, gen_strict_formula(rng, sig, k, budget - 1, positive)?),
        _ => Formula::negate(gen_strict_formula(rng, sig, k, budget - 1, positive)?),
    })
}

/// Random level-`k` point of the model.
pub fn pick_point(rng: &mut ChaCha8Rng, m: &LayeredModel, k: usize) -> WorldTuple {
    let points: Vec<&WorldTuple> = m.domain_at(k).iter().collect();
    (*points.choose(rng).expect("empty domain")).clone()
}
