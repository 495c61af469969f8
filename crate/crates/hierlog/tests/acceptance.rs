//! End-to-end acceptance checks: every stated guarantee of the library,
//! each as one test with a single summary line on success.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use hierlog::model::TuplePair;
use hierlog::{
    check_bisimulation, eval_fol, largest_bisimulation, largest_simulation, point_vars, refines,
    satisfies, satisfying_points, standard_translation, translate_model, EquivError, FamilyKind,
    Formula, Hierarchy, LayeredModel, RelationFamily, SimVerdict, Verdict, WorldTuple,
};

use common::{
    gen_formula, gen_model, gen_model_pair, gen_signature, gen_strict_formula, load_fixture,
    pick_point, rng,
};

/// Direct satisfaction and first-order evaluation of the translation
/// agree on every random (model, point, formula) triple.
#[test]
fn translation_agrees_with_direct_evaluation() {
    let mut rng = rng(0xA11CE);
    let mut triples = 0usize;
    for _ in 0..400 {
        let sig = gen_signature(&mut rng, 2);
        let hier = rng.gen_bool(0.5);
        let m = gen_model(&mut rng, &sig, 3, 12, hier);
        let fol_model = translate_model(&m).unwrap();
        for _ in 0..25 {
            let k = rng.gen_range(0..=m.depth());
            let point = pick_point(&mut rng, &m, k);
            let f = gen_formula(&mut rng, &sig, k, 4, false);
            let direct = satisfies(&m, &point, &f).unwrap();
            let vars = point_vars(k);
            let sentence = standard_translation(&f, k, &vars).unwrap();
            let assignment: BTreeMap<String, String> = vars
                .iter()
                .map(|v| v.name.clone())
                .zip(point.ids().iter().cloned())
                .collect();
            let translated = eval_fol(&fol_model, &assignment, &sentence).unwrap();
            assert_eq!(
                direct, translated,
                "evaluation paths disagree on {f} at {point}"
            );
            triples += 1;
        }
    }
    assert!(triples >= 10_000);
    println!("PASS evaluation paths agree on {triples} random triples");
}

/// The jump example: true at its point and rendered exactly.
#[test]
fn worked_jump_example_holds_and_translates_exactly() {
    let m = load_fixture("strongbox.json");
    let f = Formula::parse("@idle closed", m.sig()).unwrap();
    let point = WorldTuple::of(&["closed", "idle"]);
    assert!(satisfies(&m, &point, &f).unwrap());
    let rendered = standard_translation(&f, 1, &point_vars(1))
        .unwrap()
        .to_string();
    assert_eq!(rendered, "D1(x0, idle) ∧ (closed = x0)");
    println!("PASS jump example satisfied and rendered as {rendered:?}");
}

/// Dropping one low-level transition: the move is still reachable one
/// level up, unreachable at the bottom, and the hierarchy check names
/// the missing pair.
#[test]
fn broken_projection_fixture_behaves_as_expected() {
    let m = load_fixture("strongbox_nonhier.json");
    let point = WorldTuple::of(&["closed", "idle"]);
    let up = Formula::parse("<1> get_access", m.sig()).unwrap();
    let down = Formula::parse("<0> get_access", m.sig()).unwrap();
    assert!(satisfies(&m, &point, &up).unwrap());
    assert!(!satisfies(&m, &point, &down).unwrap());
    match m.hierarchy().unwrap() {
        Hierarchy::NotHierarchical {
            level: 1,
            pair,
            missing_from_lower: true,
        } => {
            assert_eq!(
                pair,
                (WorldTuple::of(&["closed"]), WorldTuple::of(&["get_access"]))
            );
        }
        other => panic!("unexpected hierarchy verdict: {other:?}"),
    }
    println!("PASS broken projection detected with the expected witness pair");
}

/// Points related by the largest bisimulation agree on every formula
/// whose symbols sit exactly at that level.
#[test]
fn bisimilar_points_agree_on_strict_formulas() {
    let mut rng = rng(0xB151);
    let mut pairs_checked = 0usize;
    let mut comparisons = 0usize;
    for round in 0..120 {
        // Mix in self-pairs: their largest bisimulation contains the
        // identity, so related pairs are never scarce.
        let (m, mp) = if round % 4 == 3 {
            let sig = gen_signature(&mut rng, 2);
            let m = gen_model(&mut rng, &sig, 3, 8, round % 2 == 0);
            (m.clone(), m)
        } else {
            gen_model_pair(&mut rng, 2, 3, 8, round % 2 == 0)
        };
        let family = largest_bisimulation(&m, &mp, FamilyKind::Layered).unwrap();
        let components = family.layered_components().unwrap().to_vec();
        let per_level = 100 / (m.depth() + 1) + 1;
        for (k, bk) in components.iter().enumerate() {
            for _ in 0..per_level {
                let Some(f) = gen_strict_formula(&mut rng, m.sig(), k, 3, false) else {
                    continue;
                };
                let left = satisfying_points(&m, &f, k).unwrap();
                let right = satisfying_points(&mp, &f, k).unwrap();
                for (u, up) in bk {
                    assert_eq!(
                        left.contains(u),
                        right.contains(up),
                        "bisimilar points ({u},{up}) disagree on {f}"
                    );
                    comparisons += 1;
                }
            }
            pairs_checked += bk.len();
        }
    }
    println!("PASS {comparisons} agreement checks over {pairs_checked} bisimilar pairs");
}

/// Simulation transports truth of negation-free strict formulas from
/// the simulated model to the simulating one.
#[test]
fn simulation_preserves_positive_formulas() {
    let mut rng = rng(0x51AB);
    let mut comparisons = 0usize;
    for round in 0..100 {
        let (m, mp) = gen_model_pair(&mut rng, 2, 3, 8, round % 2 == 0);
        let family = largest_simulation(&m, &mp, FamilyKind::Layered).unwrap();
        let components = family.layered_components().unwrap().to_vec();
        let per_level = 100 / (m.depth() + 1) + 1;
        for (k, sk) in components.iter().enumerate() {
            for _ in 0..per_level {
                let Some(f) = gen_strict_formula(&mut rng, m.sig(), k, 3, true) else {
                    continue;
                };
                let left = satisfying_points(&m, &f, k).unwrap();
                let right = satisfying_points(&mp, &f, k).unwrap();
                for (u, up) in sk {
                    if left.contains(u) {
                        assert!(right.contains(up), "simulation loses {f} across ({u},{up})");
                    }
                    comparisons += 1;
                }
            }
        }
    }
    println!("PASS positive formulas preserved across {comparisons} simulation pair checks");
}

fn enumerate_layered_union(
    m: &LayeredModel,
    mp: &LayeredModel,
    universes: &[Vec<TuplePair>],
) -> Vec<BTreeSet<TuplePair>> {
    let sizes: Vec<usize> = universes.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().sum();
    assert!(total <= 20, "enumeration universe too large: {total} bits");
    let mut union: Vec<BTreeSet<TuplePair>> = vec![BTreeSet::new(); universes.len()];
    for mask in 0u64..(1u64 << total) {
        let mut bit = 0;
        let mut components = Vec::with_capacity(universes.len());
        for (k, u) in universes.iter().enumerate() {
            let mut set = BTreeSet::new();
            for pair in &u[..sizes[k]] {
                if mask >> bit & 1 == 1 {
                    set.insert(pair.clone());
                }
                bit += 1;
            }
            components.push(set);
        }
        let family = RelationFamily::Layered(components.clone());
        if check_bisimulation(m, mp, &family, FamilyKind::Layered).unwrap() == Verdict::Holds {
            for (k, set) in components.into_iter().enumerate() {
                union[k].extend(set);
            }
        }
    }
    union
}

/// On models small enough to enumerate every candidate family, the
/// fixpoint matches the union of all families that pass the checker.
#[test]
fn largest_bisimulation_matches_exhaustive_enumeration() {
    let mut rng = rng(0x6F9);
    let mut families = 0usize;
    for round in 0..60 {
        let hier = round % 3 == 0;
        let (m, mp) = gen_model_pair(&mut rng, 1, 2, 2, hier);

        let universes: Vec<Vec<TuplePair>> = (0..=m.depth())
            .map(|k| {
                let mut u = Vec::new();
                for s in m.domain_at(k) {
                    for t in mp.domain_at(k) {
                        u.push((s.clone(), t.clone()));
                    }
                }
                u
            })
            .collect();

        let computed = largest_bisimulation(&m, &mp, FamilyKind::Layered).unwrap();
        let union = enumerate_layered_union(&m, &mp, &universes);
        assert_eq!(computed, RelationFamily::Layered(union));
        families += 1 << universes.iter().map(Vec::len).sum::<usize>();

        if hier {
            let top = universes.last().unwrap();
            let mut union = BTreeSet::new();
            for mask in 0u64..(1u64 << top.len()) {
                let set: BTreeSet<TuplePair> = top
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect();
                let family = RelationFamily::Hierarchical(set.clone());
                if check_bisimulation(&m, &mp, &family, FamilyKind::Hierarchical).unwrap()
                    == Verdict::Holds
                {
                    union.extend(set);
                }
            }
            let computed = largest_bisimulation(&m, &mp, FamilyKind::Hierarchical).unwrap();
            assert_eq!(computed, RelationFamily::Hierarchical(union));
            families += 1 << top.len();
        }
    }
    println!("PASS fixpoint equals enumeration union over {families} candidate families");
}

/// The bundled fixtures refine each other in one direction only.
#[test]
fn refinement_chain_between_bundled_fixtures() {
    let sb0 = load_fixture("strongbox0.json");
    let sb = load_fixture("strongbox.json");
    let reset = load_fixture("strongbox_reset.json");

    assert_eq!(
        refines(&sb0, &sb, FamilyKind::Hierarchical).unwrap(),
        SimVerdict::Total
    );
    assert_eq!(
        refines(&sb, &reset, FamilyKind::Hierarchical).unwrap(),
        SimVerdict::Total
    );

    assert_eq!(
        refines(&sb, &sb0, FamilyKind::Hierarchical),
        Err(EquivError::SignatureMismatch)
    );
    match refines(&reset, &sb, FamilyKind::Hierarchical).unwrap() {
        SimVerdict::NotTotal { witness, .. } => {
            assert_eq!(
                witness,
                WorldTuple::of(&["closed", "blocked", "bot_blocked"])
            );
        }
        SimVerdict::Total => panic!("reversed refinement should fail"),
    }
    println!("PASS refinement chain holds forward and fails reversed");
}

/// Truncating a computed bisimulation yields a bisimulation between the
/// correspondingly truncated models, at every cut level.
#[test]
fn truncated_bisimulations_remain_bisimulations() {
    let mut rng = rng(0x7C8);
    let mut checks = 0usize;
    for round in 0..80 {
        let (m, mp) = if round % 4 == 3 {
            let sig = gen_signature(&mut rng, 2);
            let m = gen_model(&mut rng, &sig, 3, 8, round % 2 == 0);
            (m.clone(), m)
        } else {
            gen_model_pair(&mut rng, 2, 3, 8, round % 2 == 0)
        };
        let family = largest_bisimulation(&m, &mp, FamilyKind::Layered).unwrap();
        for k in 0..=m.depth() {
            let truncated = family.truncate(k).unwrap();
            let verdict = check_bisimulation(
                &m.restrict(k).unwrap(),
                &mp.restrict(k).unwrap(),
                &truncated,
                FamilyKind::Layered,
            )
            .unwrap();
            assert_eq!(
                verdict,
                Verdict::Holds,
                "truncation to {k} broke the family"
            );
            checks += 1;
        }
    }
    println!("PASS {checks} truncations all pass the checker");
}
