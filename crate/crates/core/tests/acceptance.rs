//! Acceptance gate: one test per criterion, each printing a single pass/fail
//! line (run with `--nocapture` to see them on success).

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use deon::cli::{load_system, parse_candidate};
use deon::lab::{atomic_system, random_system, registry, run_paper_suite, SearchReport, Status};
use deon::metric::Variant;
use deon::model::{Model, ModelSet, Vocabulary};
use deon::obligations::{
    check_hard_obligation, check_soft_obligation, derive_obligations, is_classical_consequence,
    is_independent, CheckOptions, ObligationSystem,
};
use deon::size::SizeSpec;

const SEED: u64 = 42;

/// The full suite, run once and shared across criteria.
fn suite() -> &'static (Vec<SearchReport>, Duration) {
    static SUITE: OnceLock<(Vec<SearchReport>, Duration)> = OnceLock::new();
    SUITE.get_or_init(|| {
        let start = Instant::now();
        let reports = run_paper_suite(SEED);
        (reports, start.elapsed())
    })
}

fn report(n: usize, name: &str, ok: bool) {
    println!("acceptance criterion {n} ({name}): {}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "acceptance criterion {n} ({name}) failed");
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn criterion_1_golden_examples() {
    let start = Instant::now();
    let claims = registry();
    let goldens: Vec<_> = claims.iter().filter(|c| c.id.starts_with("example-")).collect();
    assert_eq!(goldens.len(), 8, "every worked example has a golden claim");
    let all_ok = goldens
        .iter()
        .all(|c| deon::lab::evaluate_claim(c, &[], SEED, None).ok);
    let fast = start.elapsed() < Duration::from_secs(1);
    report(1, "golden examples", all_ok && fast);
}

#[test]
fn criterion_2_theorem_claims() {
    let (reports, elapsed) = suite();
    let theorems: Vec<_> = reports
        .iter()
        .filter(|r| matches!(r.status, Status::Theorem))
        .collect();
    assert!(theorems.len() >= 30, "the registry covers every stated fact");
    let clean = theorems.iter().all(|r| r.ok && r.counterexamples == 0);
    // Pool-swept claims cover at least the 273 exhaustive n ≤ 3 systems;
    // golden example claims replay a fixed scenario instead, and garbage-in
    // only fires on the few independent systems in the pool.
    let exhaustive = theorems
        .iter()
        .filter(|r| !r.claim.starts_with("example-") && r.claim != "product-pref")
        .all(|r| r.instances >= 273 || r.claim == "garbage-in");
    report(2, "theorem claims exhaustive", clean && exhaustive && *elapsed < Duration::from_secs(60));
}

#[test]
fn criterion_3_refutable_claims() {
    let (reports, _) = suite();
    let required = [
        "closed-implies-contains-best",
        "closed-best-implies-cp",
        "closed-best-implies-neighbourhood",
        "closed-best-implies-d-o",
        "ui-implies-contains-best",
        "cp-count-implies-improving-neighbourhood",
        "relativization-best",
        "relativization-d-o",
        "relativization-local",
    ];
    let mut ok = true;
    for id in required {
        let r = reports.iter().find(|r| r.claim == id);
        ok &= r.is_some_and(|r| r.ok && r.counterexample.is_some());
    }
    report(3, "refutable claims witnessed", ok);
}

#[test]
fn criterion_4_derivation_oracle() {
    // The registry claim sweeps every atomic n ≤ 3 system against an unpruned
    // independent enumeration; here we additionally pin the (p, q) output.
    let (reports, _) = suite();
    let oracle_ok = reports
        .iter()
        .find(|r| r.claim == "derive-oracle")
        .is_some_and(|r| r.ok && r.counterexamples == 0);

    let sys = atomic_system(&["p", "q"], None);
    let derivation = derive_obligations(
        &sys,
        &sys.derived_quality(Variant::Set),
        &CheckOptions::default(),
        None,
    )
    .unwrap();
    let sets: Vec<Vec<String>> = derivation.items.iter().map(|(x, _)| x.bitstrings()).collect();
    let expected = vec![
        vec!["11".to_string()],
        vec!["01".to_string(), "11".to_string()],
        vec!["10".to_string(), "11".to_string()],
        vec!["01".to_string(), "10".to_string(), "11".to_string()],
    ];
    report(4, "derivation oracle equivalence", oracle_ok && sets == expected);
}

#[test]
fn criterion_5_garbage_in_and_classical_consequence() {
    let names = ["a", "b", "c", "d"];
    let mut ok = true;
    for n in 1..=4usize {
        let vocab = Vocabulary::new(names[..n].to_vec()).unwrap();
        let universe = vocab.universe();
        for k in 1..=n {
            let obligations: Vec<(String, ModelSet)> = (0..k)
                .map(|i| {
                    let set =
                        ModelSet::from_models(n, universe.iter().filter(|m| m.value(i))).unwrap();
                    (names[i].to_string(), set)
                })
                .collect();
            let sets: Vec<ModelSet> = obligations.iter().map(|(_, s)| s.clone()).collect();
            let sys = ObligationSystem::new(vocab.clone(), universe.clone(), obligations).unwrap();
            ok &= is_independent(&sys).unwrap().is_none();

            let derivation = derive_obligations(
                &sys,
                &sys.derived_quality(Variant::Set),
                &CheckOptions::default(),
                None,
            )
            .unwrap();
            let derived: BTreeSet<ModelSet> =
                derivation.items.iter().map(|(x, _)| x.clone()).collect();
            for o in &sets {
                ok &= derived.contains(o);
            }
            for x in &derived {
                ok &= is_classical_consequence(x, &sys).unwrap();
            }
        }
    }
    report(5, "garbage-in and classical consequence", ok);
}

#[test]
fn criterion_6_soft_degeneracy_and_assassin() {
    // ε = 0 reproduces the hard verdict, criterion by criterion.
    let zero = SizeSpec::Fraction(0.0);
    let options = CheckOptions::default();
    let degenerate = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let n_vars = 1 + (i as usize) % 4;
            let n_obl = (i as usize) % 5;
            let sys = random_system(n_vars, n_obl, 0.5, SEED.wrapping_add(i)).unwrap();
            let elems: Vec<Model> = sys.restriction().iter().collect();
            let quality = sys.derived_quality(Variant::Set);
            for mask in 0u32..1 << elems.len() {
                let x = ModelSet::from_models(
                    sys.restriction().width(),
                    elems.iter().enumerate().filter(|(j, _)| mask & 1 << j != 0).map(|(_, m)| *m),
                )
                .unwrap();
                let hard = check_hard_obligation(&x, &sys, &quality, &options).unwrap();
                let soft = check_soft_obligation(&x, &sys, &quality, &zero, &options).unwrap();
                // The hard check reports the neighbourhood criterion as
                // failed whenever ideal cases are missing; the soft check
                // quantifies over the ideals actually present, so the flag
                // is only comparable when criterion 1.1 holds.
                if hard.accept() != soft.accept()
                    || hard.contains_ideal != soft.ideal_ok
                    || hard.downward_closed != soft.downward_closed
                    || (hard.contains_ideal
                        && hard.improving_neighbourhood != soft.improving_neighbourhood)
                    || hard.ceteris_paribus != soft.ceteris_paribus
                {
                    return false;
                }
            }
            true
        })
        .all(|ok| ok);

    // The considerate assassin: with one tolerated pair, ¬o is softly
    // accepted and the only closure exception is (k∧o, k∧¬o).
    let loaded = load_system(&fixture("assassin.json")).unwrap();
    let x = parse_candidate("~o", &loaded).unwrap();
    let size = loaded.size.clone().unwrap();
    let verdict =
        check_soft_obligation(&x, &loaded.system, &loaded.quality, &size, &options).unwrap();
    let pair = (
        Model::from_bitstring("11").unwrap(),
        Model::from_bitstring("10").unwrap(),
    );
    let assassin_ok = verdict.accept()
        && verdict.closure_exceptions == vec![pair]
        && verdict.ideal_exceptions.is_empty()
        && verdict.neighbourhood_exceptions.is_empty();

    report(6, "soft-obligation degeneracy", degenerate && assassin_ok);
}

#[test]
fn criterion_7_deterministic_reports() {
    let (first, _) = suite();
    let second = run_paper_suite(SEED);
    let a: Vec<String> = first.iter().map(|r| r.to_json()).collect();
    let b: Vec<String> = second.iter().map(|r| r.to_json()).collect();
    report(7, "byte-identical reports", a == b);
}
