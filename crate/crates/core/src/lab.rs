//! Claim registry and machine verification of the reference results.
//!
//! Every claim is either a `theorem` (no counterexample may exist) or
//! `refutable` (at least one counterexample must be found). Claims are checked
//! against golden worked examples, an exhaustive sweep over all small
//! atomic-obligation systems, a handful of hand-built systems, and a seeded
//! stream of random systems. The checks themselves run on an independent
//! bitmask re-implementation of the core predicates, so the library and the
//! lab cross-validate each other.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{models_of, parse_formula, strongest_conjunction};
use crate::metric::{interval, profile, IndexFamily, Variant};
use crate::model::{Model, ModelSet, Vocabulary};
use crate::obligations::{
    check_hard_obligation, check_soft_obligation, derive_obligations, in_d_o,
    is_classical_consequence, is_ui, CheckOptions, ObligationSystem,
};
use crate::quality::QualityRelation;
use crate::size::{product_is_big, product_relation, SizeSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabError {
    #[error("unknown claim `{0}`")]
    UnknownClaim(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("no counterexample to `{claim}` within the budget of {budget} instances")]
    BudgetExhausted { claim: String, budget: u64 },
}

/// What the reference results assert about a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Must hold on every instance.
    Theorem,
    /// Must fail on at least one instance.
    Refutable,
}

/// Result of checking one claim against one system.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub instances: u64,
    pub counterexample: Option<String>,
}

impl Outcome {
    fn ok(instances: u64) -> Self {
        Outcome { instances, counterexample: None }
    }
}

enum Kind {
    /// A self-contained reproduction of a worked example; `Err` carries the
    /// counterexample description.
    Golden(fn() -> Result<u64, String>),
    /// A property quantified over obligation systems.
    System(fn(&ObligationSystem) -> Outcome),
}

pub struct Claim {
    pub id: &'static str,
    pub description: &'static str,
    pub status: Status,
    kind: Kind,
}

/// One line of the verification report. `elapsed_ms` is display-only and is
/// excluded from serialization so that reports are byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub claim: String,
    pub status: Status,
    pub ok: bool,
    pub instances: u64,
    pub counterexamples: u64,
    pub counterexample: Option<String>,
    pub seed: u64,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports are serializable")
    }
}

// ---------------------------------------------------------------------------
// System construction
// ---------------------------------------------------------------------------

/// Atomic obligations, one per variable; `U′` defaults to the full universe.
pub fn atomic_system(names: &[&str], universe: Option<&[&str]>) -> ObligationSystem {
    let vocab = Vocabulary::new(names.to_vec()).expect("valid variable names");
    let u = vocab.universe();
    let obligations: Vec<(String, ModelSet)> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let set =
                ModelSet::from_models(names.len(), u.iter().filter(|x| x.value(i))).unwrap();
            (name.to_string(), set)
        })
        .collect();
    let restriction = match universe {
        Some(strings) => {
            ModelSet::from_bitstrings(names.len(), strings.iter().copied()).unwrap()
        }
        None => u,
    };
    ObligationSystem::new(vocab, restriction, obligations).expect("well-formed system")
}

fn dependent_1() -> ObligationSystem {
    atomic_system(&["p", "q"], Some(&["10", "01"]))
}

fn dependent_2() -> ObligationSystem {
    atomic_system(&["p", "q", "r", "s"], Some(&["1000", "0100", "1111"]))
}

fn dependent_3() -> ObligationSystem {
    atomic_system(
        &["p", "q", "r", "s", "t", "u"],
        Some(&["100000", "101000", "110000", "011100", "110111"]),
    )
}

fn count_system() -> ObligationSystem {
    atomic_system(&["p", "q", "r"], Some(&["000", "001", "110"]))
}

fn not_global() -> ObligationSystem {
    atomic_system(&["p", "q", "r", "s"], Some(&["0000", "0010", "1110", "1111"]))
}

fn h_n_local() -> ObligationSystem {
    atomic_system(&["p", "q", "r", "s"], Some(&["0000", "0001", "0010", "1110"]))
}

/// Closed, contains the best elements, yet not a plain neighbourhood of them.
fn nbhd_gap() -> ObligationSystem {
    atomic_system(&["p", "q", "r", "s"], Some(&["1000", "1010", "1100", "1101"]))
}

fn assassin_system() -> ObligationSystem {
    let vocab = Vocabulary::new(["k", "o"]).unwrap();
    let u = vocab.universe();
    let not_k = models_of(&parse_formula("~k", &vocab).unwrap(), &u);
    let not_o = models_of(&parse_formula("~o", &vocab).unwrap(), &u);
    ObligationSystem::new(
        vocab,
        u,
        vec![("no_killing".to_string(), not_k), ("no_cigarettes".to_string(), not_o)],
    )
    .unwrap()
}

fn assassin_quality() -> QualityRelation {
    let layers: Vec<ModelSet> = ["00", "01", "11", "10"]
        .iter()
        .map(|s| ModelSet::from_bitstrings(2, [*s]).unwrap())
        .collect();
    QualityRelation::explicit_layers(&layers).unwrap()
}

/// The hand-built systems behind the worked examples.
pub fn fixture_systems() -> Vec<ObligationSystem> {
    vec![
        dependent_1(),
        count_system(),
        dependent_2(),
        assassin_system(),
        not_global(),
        h_n_local(),
        nbhd_gap(),
        atomic_system(&["p", "q", "r", "s"], None),
        dependent_3(),
    ]
}

/// All atomic-obligation systems with at most `max_vars` variables, one per
/// nonempty `U′`.
pub fn exhaustive_systems(max_vars: usize) -> Vec<ObligationSystem> {
    let mut out = Vec::new();
    for n in 1..=max_vars {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let vocab = Vocabulary::new(names).unwrap();
        let universe = vocab.universe();
        let models: Vec<Model> = universe.iter().collect();
        let obligations: Vec<(String, ModelSet)> = (0..n)
            .map(|i| {
                let set =
                    ModelSet::from_models(n, models.iter().copied().filter(|m| m.value(i)))
                        .unwrap();
                (vocab.name(i).to_string(), set)
            })
            .collect();
        for mask in 1u32..1 << models.len() {
            let restriction = ModelSet::from_models(
                n,
                models.iter().enumerate().filter(|(i, _)| mask & 1 << i != 0).map(|(_, m)| *m),
            )
            .unwrap();
            out.push(
                ObligationSystem::new(vocab.clone(), restriction, obligations.clone()).unwrap(),
            );
        }
    }
    out
}

/// A reproducible random system: obligations drawn model-by-model with the
/// given density, `U′` a uniformly sized nonempty sample of the universe.
pub fn random_system(
    n_vars: usize,
    n_obligations: usize,
    density: f64,
    seed: u64,
) -> Result<ObligationSystem, LabError> {
    if n_vars == 0 || n_vars > 8 {
        return Err(LabError::BadParameters(format!(
            "n_vars must be between 1 and 8, got {n_vars}"
        )));
    }
    if n_obligations > 8 {
        return Err(LabError::BadParameters(format!(
            "n_obligations must be at most 8, got {n_obligations}"
        )));
    }
    if !(density > 0.0 && density < 1.0) {
        return Err(LabError::BadParameters(format!(
            "density must lie strictly between 0 and 1, got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ ((n_vars as u64) << 32)
            ^ ((n_obligations as u64) << 40)
            ^ density.to_bits().rotate_left(7),
    );
    let vocab = Vocabulary::new((0..n_vars).map(|i| format!("v{i}"))).unwrap();
    let models: Vec<Model> = vocab.universe().iter().collect();
    let mut obligations = Vec::new();
    for i in 0..n_obligations {
        let set = ModelSet::from_models(
            n_vars,
            models.iter().copied().filter(|_| rng.gen_bool(density)),
        )
        .unwrap();
        obligations.push((format!("o{i}"), set));
    }
    // Exhaustive subset sweeps are quadratic-exponential in |U′|, so keep it
    // small.
    let size = rng.gen_range(1..=models.len().min(6));
    let mut chosen: BTreeSet<Model> = BTreeSet::new();
    while chosen.len() < size {
        chosen.insert(models[rng.gen_range(0..models.len())]);
    }
    let restriction = ModelSet::from_models(n_vars, chosen).unwrap();
    Ok(ObligationSystem::new(vocab, restriction, obligations).expect("well-formed system"))
}

/// The deterministic phase (exhaustive sweep plus fixtures, sorted so the
/// smallest counterexamples surface first) followed by `random_count` seeded
/// random systems.
pub fn system_pool(
    seed: u64,
    random_count: usize,
    max_vars: usize,
    max_obligations: usize,
) -> Vec<ObligationSystem> {
    let mut pool = exhaustive_systems(3);
    pool.extend(fixture_systems());
    pool.sort_by_key(|sys| {
        (
            sys.restriction().len(),
            sys.obligation_sets().len(),
            sys.vocab().len(),
            sys.restriction().clone(),
        )
    });
    let max_vars = max_vars.clamp(1, 8);
    for i in 0..random_count {
        let n_vars = 1 + i % max_vars;
        let n_obl = i % (max_obligations.min(8) + 1);
        pool.push(
            random_system(n_vars, n_obl, 0.5, seed.wrapping_add(i as u64))
                .expect("pool parameters are valid"),
        );
    }
    pool
}

fn describe(sys: &ObligationSystem) -> String {
    let obls: Vec<String> = sys
        .obligation_names()
        .iter()
        .zip(sys.obligation_sets())
        .map(|(n, s)| format!("{n}={s}"))
        .collect();
    format!(
        "vars=({}) U'={} obligations=[{}]",
        sys.vocab().names().join(","),
        sys.restriction(),
        obls.join(" ")
    )
}

// ---------------------------------------------------------------------------
// Bitmask oracle
// ---------------------------------------------------------------------------

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & 1 << i != 0)
}

/// An independent re-implementation of the core predicates over the members
/// of `U′` (coordinates packed into `u32` masks). Used both to cross-check
/// the library and to keep exhaustive sweeps cheap.
struct MaskCtx {
    elems: Vec<Model>,
    /// Coordinate vector per element: obligation profile or variable bits.
    coords: Vec<u32>,
    k: usize,
    full: u32,
    /// Per element: the elements at least as good / strictly better, in the
    /// set and counting variants.
    geq_s: Vec<u32>,
    gt_s: Vec<u32>,
    geq_c: Vec<u32>,
    gt_c: Vec<u32>,
    /// Per element `m`: the members of `(∩𝒪(m)) ∩ U′`.
    canon: Vec<u32>,
}

impl MaskCtx {
    fn build(elems: Vec<Model>, coords: Vec<u32>, k: usize, canon: Vec<u32>) -> Self {
        assert!(elems.len() <= 32, "mask oracle supports at most 32 members");
        let n = elems.len();
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut geq_s = vec![0u32; n];
        let mut gt_s = vec![0u32; n];
        let mut geq_c = vec![0u32; n];
        let mut gt_c = vec![0u32; n];
        for i in 0..n {
            for j in 0..n {
                let sup = coords[i] & !coords[j] == 0; // coords[i] ⊆ coords[j]
                if sup {
                    geq_s[i] |= 1 << j; // j satisfies at least what i does
                    if coords[i] != coords[j] {
                        gt_s[i] |= 1 << j;
                    }
                }
                let (ci, cj) = (coords[i].count_ones(), coords[j].count_ones());
                if cj >= ci {
                    geq_c[i] |= 1 << j;
                    if cj > ci {
                        gt_c[i] |= 1 << j;
                    }
                }
            }
        }
        MaskCtx { elems, coords, k, full, geq_s, gt_s, geq_c, gt_c, canon }
    }

    fn obligations(sys: &ObligationSystem) -> Self {
        let elems: Vec<Model> = sys.restriction().iter().collect();
        let k = sys.obligation_sets().len();
        let coords: Vec<u32> = elems
            .iter()
            .map(|m| {
                profile(m, sys.obligation_sets()).indices().fold(0u32, |acc, i| acc | 1 << i)
            })
            .collect();
        let member_mask = |set: &ModelSet| {
            elems
                .iter()
                .enumerate()
                .filter(|(_, m)| set.contains(m))
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        };
        let universe = sys.universe();
        let canon: Vec<u32> = elems
            .iter()
            .map(|m| {
                let mut inter = universe.clone();
                for set in sys.obligation_sets() {
                    if set.contains(m) {
                        inter = inter.intersection(set);
                    }
                }
                member_mask(&inter)
            })
            .collect();
        MaskCtx::build(elems, coords, k, canon)
    }

    fn variables(sys: &ObligationSystem) -> Self {
        let elems: Vec<Model> = sys.restriction().iter().collect();
        let coords: Vec<u32> = elems.iter().map(|m| m.bits()).collect();
        let k = sys.vocab().len();
        let n = elems.len();
        MaskCtx::build(elems, coords, k, vec![0; n])
    }

    fn len(&self) -> usize {
        self.elems.len()
    }

    fn set(&self, mask: u32) -> ModelSet {
        ModelSet::from_models(
            self.elems[0].width(),
            bits(mask).map(|i| self.elems[i]),
        )
        .expect("members share the width")
    }

    fn geq(&self, i: usize, variant: Variant) -> u32 {
        match variant {
            Variant::Set => self.geq_s[i],
            Variant::Count => self.geq_c[i],
        }
    }

    fn gt(&self, i: usize, variant: Variant) -> u32 {
        match variant {
            Variant::Set => self.gt_s[i],
            Variant::Count => self.gt_c[i],
        }
    }

    fn dist(&self, i: usize, j: usize) -> u32 {
        self.coords[i] ^ self.coords[j]
    }

    /// `i` is strictly better than `j`.
    fn better(&self, i: usize, j: usize, variant: Variant) -> bool {
        self.gt(j, variant) & 1 << i != 0
    }

    /// The ∥-closest members of `set` seen from `from`.
    fn closest(&self, from: usize, set: u32, variant: Variant) -> u32 {
        let mut out = 0u32;
        for j in bits(set) {
            let d = self.dist(from, j);
            let dominated = bits(set).any(|j2| {
                let d2 = self.dist(from, j2);
                match variant {
                    Variant::Set => d2 & !d == 0 && d2 != d,
                    Variant::Count => d2.count_ones() < d.count_ones(),
                }
            });
            if !dominated {
                out |= 1 << j;
            }
        }
        out
    }

    fn between(&self, i: usize, m: usize, j: usize, variant: Variant) -> bool {
        let (dim, dmj, dij) = (self.dist(i, m), self.dist(m, j), self.dist(i, j));
        match variant {
            Variant::Set => dim | dmj == dij,
            Variant::Count => dim.count_ones() + dmj.count_ones() == dij.count_ones(),
        }
    }

    fn interval(&self, i: usize, j: usize, within: u32, variant: Variant) -> u32 {
        bits(within).filter(|m| self.between(i, *m, j, variant)).fold(0, |acc, m| acc | 1 << m)
    }

    fn best(&self, within: u32, variant: Variant) -> u32 {
        bits(within).filter(|i| self.gt(*i, variant) & within == 0).fold(0, |acc, i| acc | 1 << i)
    }

    fn closed(&self, x: u32, within: u32, variant: Variant) -> bool {
        bits(x).all(|i| self.geq(i, variant) & within & !x == 0)
    }

    /// `X ≺_l (within − X)` with matching quality and metric variants.
    fn cp(&self, x: u32, within: u32, variant: Variant) -> bool {
        let y = within & !x;
        for i in bits(x) {
            for j in bits(self.closest(i, y, variant)) {
                if !self.better(i, j, variant) {
                    return false;
                }
            }
        }
        for j in bits(y) {
            for i in bits(self.closest(j, x, variant)) {
                if !self.better(i, j, variant) {
                    return false;
                }
            }
        }
        true
    }

    /// Geodesic containment towards `ideals`; the improving form restricts
    /// each member to the ideals at least as good as it.
    fn nbhd(&self, x: u32, ideals: u32, within: u32, improving: bool, variant: Variant) -> bool {
        for m in bits(x) {
            let targets = if improving { ideals & self.geq(m, variant) } else { ideals };
            for j in bits(self.closest(m, targets, variant)) {
                if self.interval(j, m, within, variant) & !x != 0 {
                    return false;
                }
            }
        }
        true
    }

    fn ui(&self, x: u32) -> bool {
        bits(x).fold(0u32, |acc, i| acc | self.canon[i]) & !x == 0
    }

    fn d_o(&self, x: u32, within: u32) -> bool {
        debug_assert_eq!(x & !within, 0);
        for domain in 0u32..1 << self.k {
            let mut req = domain;
            loop {
                let mut sat = 0u32;
                for i in bits(within) {
                    if self.coords[i] & domain == req {
                        sat |= 1 << i;
                    }
                }
                let inside = sat & x;
                if inside != 0 {
                    for j in bits(sat & !x) {
                        if inside & self.gt_s[j] == 0 {
                            return false;
                        }
                    }
                }
                if req == 0 {
                    break;
                }
                req = (req - 1) & domain;
            }
        }
        true
    }

    fn independent(&self) -> bool {
        (0u32..1 << self.k).all(|delta| self.coords.iter().any(|c| *c == delta))
    }
}

/// All subset masks of a carrier of `len` elements, smallest first.
fn subset_masks(len: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0u32..1 << len).collect();
    v.sort_by_key(|m| (m.count_ones(), *m));
    v
}

// ---------------------------------------------------------------------------
// Golden checks
// ---------------------------------------------------------------------------

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn golden_count() -> Result<u64, String> {
    let sys = count_system();
    let c = MaskCtx::obligations(&sys);
    // Elements in bitstring order: 000, 001, 110.
    let (z, x, y) = (0usize, 1usize, 2usize);
    ensure(c.dist(x, y).count_ones() == 3, "d_c(x, y) should be 3")?;
    ensure(c.dist(x, z).count_ones() == 1, "d_c(x, z) should be 1")?;
    ensure(c.dist(z, y).count_ones() == 2, "d_c(z, y) should be 2")?;
    ensure(!c.between(y, x, z, Variant::Count), "x should not lie between y and z")?;
    ensure(
        c.better(y, x, Variant::Count) && c.better(x, z, Variant::Count),
        "counting quality should order y before x before z",
    )?;
    Ok(5)
}

fn golden_dependent_1() -> Result<u64, String> {
    let sys = dependent_1();
    let c = MaskCtx::obligations(&sys);
    let x = 0b10u32; // {10}; elements are 01, 10
    ensure(c.closed(x, c.full, Variant::Set), "X = {10} should be downward closed")?;
    ensure(c.best(c.full, Variant::Set) == c.full, "both worlds should be best")?;
    let quality = sys.derived_quality(Variant::Set);
    let verdict = check_hard_obligation(
        &c.set(x),
        &sys,
        &quality,
        &CheckOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(!verdict.accept() && !verdict.contains_ideal, "X should be rejected for missing 01")?;
    Ok(3)
}

fn golden_dependent_2() -> Result<u64, String> {
    let sys = dependent_2();
    let quality = sys.derived_quality(Variant::Set);
    let x = ModelSet::from_bitstrings(4, ["1000", "1111"]).unwrap();
    let verdict =
        check_hard_obligation(&x, &sys, &quality, &CheckOptions::default()).map_err(|e| e.to_string())?;
    ensure(verdict.accept(), "X = p-worlds should be accepted without the cp criterion")?;
    ensure(verdict.ui, "X should be a union of intersections")?;
    ensure(!verdict.ceteris_paribus, "X should not be ceteris paribus improving")?;
    let strict = CheckOptions { require_cp: true, ..CheckOptions::default() };
    let verdict = check_hard_obligation(&x, &sys, &quality, &strict).map_err(|e| e.to_string())?;
    ensure(!verdict.accept(), "the cp criterion should reject X")?;
    ensure(
        in_d_o(&x, &sys).map_err(|e| e.to_string())?.is_some(),
        "X should fall outside D(O)",
    )?;
    Ok(5)
}

fn golden_dependent_3() -> Result<u64, String> {
    let sys = dependent_3();
    let c = MaskCtx::obligations(&sys);
    // Elements in bitstring order: 011100, 100000, 101000, 110000, 110111.
    let (xp, y, xpp, z, x) = (0usize, 1usize, 2usize, 3usize, 4usize);
    let best = c.best(c.full, Variant::Set);
    ensure(best == 1 << xp | 1 << xpp | 1 << x, "best should be the three maximal worlds")?;
    let cand = c.full & !(1u32 << y);
    ensure(c.closed(cand, c.full, Variant::Set), "X should be downward closed")?;
    ensure(
        c.closest(z, best, Variant::Set) & 1 << xpp != 0,
        "x'' should be among the closest best elements to z",
    )?;
    ensure(
        c.interval(z, xpp, c.full, Variant::Set) == 1 << z | 1 << y | 1 << xpp,
        "[z, x''] should be {z, y, x''}",
    )?;
    ensure(
        !c.nbhd(cand, best, c.full, false, Variant::Set),
        "X should not be a plain neighbourhood of the best elements",
    )?;
    ensure(
        c.nbhd(cand, best, c.full, true, Variant::Set),
        "X should still be an improving neighbourhood",
    )?;
    Ok(6)
}

fn golden_not_global() -> Result<u64, String> {
    let sys = not_global();
    let c = MaskCtx::obligations(&sys);
    // Elements in bitstring order: 0000, 0010, 1110, 1111.
    let x = 0b1010u32; // {0010, 1111}
    ensure(c.cp(x, c.full, Variant::Count), "X should improve things ceteris paribus (counting)")?;
    ensure(!c.closed(x, c.full, Variant::Count), "X should not be closed under counting quality")?;
    ensure(!c.cp(x, c.full, Variant::Set), "the set variant should reject the cp condition")?;
    let best = c.best(c.full, Variant::Count);
    ensure(
        !c.nbhd(x, best, c.full, true, Variant::Count),
        "X should not be an improving neighbourhood of 1111",
    )?;
    Ok(4)
}

fn golden_h_n_local() -> Result<u64, String> {
    let sys = h_n_local();
    let c = MaskCtx::obligations(&sys);
    // Elements in bitstring order: 0000, 0001, 0010, 1110.
    let x = 0b1101u32; // {0000, 0010, 1110}
    let best = c.best(c.full, Variant::Count);
    ensure(best == 0b1000, "1110 should be the unique counting-best world")?;
    ensure(
        c.nbhd(x, best, c.full, true, Variant::Count),
        "X should be an improving neighbourhood in the counting variant",
    )?;
    ensure(!c.cp(x, c.full, Variant::Count), "X should not be locally better than its complement")?;
    Ok(3)
}

fn golden_burnt_letter() -> Result<u64, String> {
    let sys = atomic_system(&["p", "q"], None);
    let quality = sys.derived_quality(Variant::Set);
    let ross = models_of(&parse_formula("p | ~q", sys.vocab()).unwrap(), &sys.universe());
    let verdict =
        check_hard_obligation(&ross, &sys, &quality, &CheckOptions::default()).map_err(|e| e.to_string())?;
    ensure(!verdict.accept(), "p or not-q should be rejected")?;
    let w = verdict.closure_witness.ok_or("a closure witness was expected")?;
    ensure(
        w.better.to_string() == "01" && w.member.to_string() == "00",
        "the closure failure should be 01 against 00",
    )?;
    ensure(!is_ui(&ross, &sys).map_err(|e| e.to_string())?.holds, "the set is not a union of intersections")?;
    Ok(3)
}

fn golden_assassin() -> Result<u64, String> {
    let sys = assassin_system();
    let quality = assassin_quality();
    let not_o = ModelSet::from_bitstrings(2, ["00", "10"]).unwrap();
    let soft = check_soft_obligation(
        &not_o,
        &sys,
        &quality,
        &SizeSpec::Fraction(0.1),
        &CheckOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(soft.accept(), "offering a cigarette should be softly acceptable")?;
    ensure(
        soft.closure_exceptions.len() == 1
            && soft.closure_exceptions[0].0.to_string() == "11"
            && soft.closure_exceptions[0].1.to_string() == "10",
        "the single closure exception should be (11, 10)",
    )?;
    let hard =
        check_hard_obligation(&not_o, &sys, &quality, &CheckOptions::default()).map_err(|e| e.to_string())?;
    let strict = check_soft_obligation(
        &not_o,
        &sys,
        &quality,
        &SizeSpec::Fraction(0.0),
        &CheckOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(
        !hard.accept() && strict.accept() == hard.accept(),
        "a zero budget should reproduce the hard rejection",
    )?;
    Ok(3)
}

/// Exhaustive check that the product of two preferential size notions has
/// generator `μ(X) × μ(X′)`.
fn golden_product_pref() -> Result<u64, String> {
    let carrier: BTreeSet<u8> = [0, 1, 2].into();
    let carrier2: BTreeSet<u8> = [0, 1].into();
    let all_pairs = |c: &BTreeSet<u8>| -> Vec<(u8, u8)> {
        c.iter().flat_map(|a| c.iter().map(move |b| (*a, *b))).collect()
    };
    let pairs = all_pairs(&carrier);
    let pairs2 = all_pairs(&carrier2);
    let mut instances = 0u64;
    for rel_mask in 0u32..1 << pairs.len() {
        let rel: BTreeSet<(u8, u8)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| rel_mask & 1 << i != 0)
            .map(|(_, p)| *p)
            .collect();
        let mu = SizeSpec::PrefRelation(rel.clone()).mu(&carrier).unwrap();
        for rel2_mask in 0u32..1 << pairs2.len() {
            instances += 1;
            let rel2: BTreeSet<(u8, u8)> = pairs2
                .iter()
                .enumerate()
                .filter(|(i, _)| rel2_mask & 1 << i != 0)
                .map(|(_, p)| *p)
                .collect();
            let mu2 = SizeSpec::PrefRelation(rel2.clone()).mu(&carrier2).unwrap();
            let product = product_relation(&rel, &rel2, &carrier, &carrier2);
            let product_carrier: BTreeSet<(u8, u8)> =
                carrier.iter().flat_map(|a| carrier2.iter().map(move |b| (*a, *b))).collect();
            let mu_product = SizeSpec::PrefRelation(product).mu(&product_carrier).unwrap();
            let rectangle: BTreeSet<(u8, u8)> =
                mu.iter().flat_map(|a| mu2.iter().map(move |b| (*a, *b))).collect();
            if mu_product != rectangle {
                return Err(format!(
                    "relations {rel:?} and {rel2:?}: product generator {mu_product:?} differs from the rectangle {rectangle:?}"
                ));
            }
            let big = product_is_big(
                &rectangle,
                &carrier,
                &carrier2,
                &SizeSpec::PrefRelation(rel.clone()),
                &SizeSpec::PrefRelation(rel2.clone()),
            )
            .unwrap();
            if !big {
                return Err(format!(
                    "relations {rel:?} and {rel2:?}: the generator rectangle should be big"
                ));
            }
        }
    }
    Ok(instances)
}

fn golden_ross() -> Result<u64, String> {
    let sys = atomic_system(&["p", "q"], None);
    let quality = sys.derived_quality(Variant::Set);
    let ross = models_of(&parse_formula("p | ~q", sys.vocab()).unwrap(), &sys.universe());
    let verdict =
        check_hard_obligation(&ross, &sys, &quality, &CheckOptions::default()).map_err(|e| e.to_string())?;
    if verdict.accept() {
        Ok(1)
    } else {
        Err(format!(
            "{}: X={ross} is not derivable: {}",
            describe(&sys),
            verdict
                .closure_witness
                .map(|w| w.to_string())
                .unwrap_or_else(|| "criteria fail".to_string())
        ))
    }
}

// ---------------------------------------------------------------------------
// System checks
// ---------------------------------------------------------------------------

fn refute(sys: &ObligationSystem, instances: u64, detail: String) -> Outcome {
    Outcome { instances, counterexample: Some(format!("{}: {detail}", describe(sys))) }
}

fn chk_distance_laws(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let n = c.len();
    let mut instances = 0u64;
    for x in 0..n {
        for y in 0..n {
            instances += 1;
            if x == y && c.dist(x, y) != 0 {
                return refute(sys, instances, format!("d({}, {}) is not empty", c.elems[x], c.elems[y]));
            }
            if c.dist(x, y) != c.dist(y, x) {
                return refute(sys, instances, "distance is not symmetric".to_string());
            }
            for z in 0..n {
                instances += 1;
                let (dxy, dyz, dxz) = (c.dist(x, y), c.dist(y, z), c.dist(x, z));
                if dxz & !(dxy | dyz) != 0 {
                    return refute(
                        sys,
                        instances,
                        format!(
                            "set triangle law fails for ({}, {}, {})",
                            c.elems[x], c.elems[y], c.elems[z]
                        ),
                    );
                }
                if dxz.count_ones() > dxy.count_ones() + dyz.count_ones() {
                    return refute(
                        sys,
                        instances,
                        format!(
                            "counting triangle law fails for ({}, {}, {})",
                            c.elems[x], c.elems[y], c.elems[z]
                        ),
                    );
                }
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_between_laws(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let n = c.len();
    let mut instances = 0u64;
    for x in 0..n {
        for z in 0..n {
            instances += 1;
            let dxz = c.dist(x, z);
            // Agreement set: members deviating from x only where x, z differ.
            let agree: u32 =
                (0..n).filter(|m| c.dist(x, *m) & !dxz == 0).fold(0, |acc, m| acc | 1 << m);
            let iv_s = c.interval(x, z, c.full, Variant::Set);
            let iv_c = c.interval(x, z, c.full, Variant::Count);
            if iv_s != agree || iv_c != agree {
                return refute(
                    sys,
                    instances,
                    format!(
                        "[{}, {}] differs from the agreement set {}",
                        c.elems[x],
                        c.elems[z],
                        c.set(agree)
                    ),
                );
            }
            for m in bits(agree) {
                let (dxm, dmz) = (c.dist(x, m), c.dist(m, z));
                if dxm | dmz != dxz || dxm & dmz != 0 {
                    return refute(
                        sys,
                        instances,
                        format!(
                            "distance through {} does not split [{}, {}] disjointly",
                            c.elems[m], c.elems[x], c.elems[z]
                        ),
                    );
                }
            }
            for y in 0..n {
                for variant in [Variant::Set, Variant::Count] {
                    if c.between(x, y, z, variant) != c.between(z, y, x, variant) {
                        return refute(sys, instances, "betweenness is not symmetric".to_string());
                    }
                }
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_interval_formula(sys: &ObligationSystem) -> Outcome {
    let universe = sys.universe();
    let fam = IndexFamily::Variables(sys.vocab().len());
    let models: Vec<Model> = universe.iter().collect();
    let mut instances = 0u64;
    for x in &models {
        for y in &models {
            instances += 1;
            let pair = ModelSet::from_models(universe.width(), [*x, *y]).unwrap();
            let phi = strongest_conjunction(&pair).expect("the pair is nonempty");
            let expected = models_of(&phi, &universe);
            for variant in [Variant::Set, Variant::Count] {
                if interval(x, y, &universe, variant, &fam) != expected {
                    return refute(
                        sys,
                        instances,
                        format!(
                            "[{x}, {y}] over the variables differs from the models of {}",
                            phi.pretty(sys.vocab())
                        ),
                    );
                }
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_subset_closure(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if c.len() > 8 {
        return Outcome::ok(0);
    }
    let mut instances = 0u64;
    for v in 0..=c.full {
        let mut d = v;
        loop {
            instances += 1;
            let in_full = c.closed(d, c.full, Variant::Set);
            let in_v = c.closed(d, v, Variant::Set);
            if in_full && !in_v {
                return refute(
                    sys,
                    instances,
                    format!("{} closed in U' but not in {}", c.set(d), c.set(v)),
                );
            }
            if in_v && c.closed(v, c.full, Variant::Set) && !in_full {
                return refute(
                    sys,
                    instances,
                    format!("{} closed in the closed set {} but not in U'", c.set(d), c.set(v)),
                );
            }
            if d == 0 {
                break;
            }
            d = (d - 1) & v;
        }
    }
    Outcome::ok(instances)
}

fn chk_quality_distance(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let n = c.len();
    let mut instances = 0u64;
    for x in 0..n {
        for y in 0..n {
            // x at least as good as y: distance is the profile surplus.
            if c.geq_s[y] & 1 << x != 0 {
                instances += 1;
                if c.dist(x, y) != c.coords[x] & !c.coords[y] {
                    return refute(
                        sys,
                        instances,
                        format!("d({}, {}) differs from the profile surplus", c.elems[x], c.elems[y]),
                    );
                }
            }
            if c.better(x, y, Variant::Set) {
                // Everything between a strict pair is sandwiched in quality.
                instances += 1;
                for m in bits(c.interval(x, y, c.full, Variant::Set)) {
                    if c.geq_s[m] & 1 << x == 0 || c.geq_s[y] & 1 << m == 0 {
                        return refute(
                            sys,
                            instances,
                            format!(
                                "{} between {} and {} escapes the quality sandwich",
                                c.elems[m], c.elems[x], c.elems[y]
                            ),
                        );
                    }
                }
            }
            for z in 0..n {
                // Strict chain x ≻ y ≻ z (x best): split distances.
                if c.better(x, y, Variant::Set) && c.better(y, z, Variant::Set) {
                    instances += 1;
                    let (dxy, dyz, dxz) = (c.dist(x, y), c.dist(y, z), c.dist(x, z));
                    let comparable = dxy & !dyz == 0 || dyz & !dxy == 0;
                    if comparable || dxy | dyz != dxz || !c.between(x, y, z, Variant::Set) {
                        return refute(
                            sys,
                            instances,
                            format!(
                                "chain ({}, {}, {}) violates the distance decomposition",
                                c.elems[x], c.elems[y], c.elems[z]
                            ),
                        );
                    }
                }
                // Incomparable improvements of the same point.
                if c.better(x, z, Variant::Set)
                    && c.better(y, z, Variant::Set)
                    && c.geq_s[y] & 1 << x == 0
                    && c.geq_s[x] & 1 << y == 0
                {
                    instances += 1;
                    let (dxz, dyz) = (c.dist(x, z), c.dist(y, z));
                    if dxz & !dyz == 0 || dyz & !dxz == 0 {
                        return refute(
                            sys,
                            instances,
                            format!(
                                "incomparable improvements {} and {} of {} have comparable distances",
                                c.elems[x], c.elems[y], c.elems[z]
                            ),
                        );
                    }
                }
            }
        }
    }
    Outcome::ok(instances)
}

/// Run `check` over all subsets of `U′`, stopping at the first counterexample.
fn sweep_subsets(
    sys: &ObligationSystem,
    c: &MaskCtx,
    mut check: impl FnMut(u32) -> Option<String>,
) -> Outcome {
    let mut instances = 0u64;
    for x in subset_masks(c.len()) {
        instances += 1;
        if let Some(detail) = check(x) {
            return refute(sys, instances, format!("X={}: {detail}", c.set(x)));
        }
    }
    Outcome::ok(instances)
}

fn implication(
    sys: &ObligationSystem,
    c: &MaskCtx,
    hyp: impl Fn(u32) -> bool,
    concl: impl Fn(u32) -> bool,
    detail: &str,
) -> Outcome {
    sweep_subsets(sys, c, |x| (hyp(x) && !concl(x)).then(|| detail.to_string()))
}

fn chk_local_implies_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    implication(
        sys,
        &c,
        |x| x != 0 && c.cp(x, c.full, Variant::Set),
        |x| c.closed(x, c.full, Variant::Set),
        "ceteris paribus improving but not downward closed",
    )
}

fn chk_cp_implies_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    sweep_subsets(sys, &c, |x| {
        if x == 0 {
            return None;
        }
        for variant in [Variant::Set, Variant::Count] {
            if c.cp(x, c.full, variant) && c.best(c.full, variant) & !x != 0 {
                return Some(format!(
                    "ceteris paribus improving ({variant:?}) but missing a best element"
                ));
            }
        }
        None
    })
}

fn chk_count_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    implication(
        sys,
        &c,
        |x| c.closed(x, c.full, Variant::Count),
        |x| c.cp(x, c.full, Variant::Count),
        "closed under counting quality but not ceteris paribus improving",
    )
}

fn chk_neighbourhood_algebra(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::variables(sys);
    if c.len() > 8 {
        return Outcome::ok(0);
    }
    let mut instances = 0u64;
    for variant in [Variant::Set, Variant::Count] {
        for anchor in 0..c.len() {
            let x = 1u32 << anchor;
            instances += 1;
            if !c.nbhd(x, x, c.full, false, variant) || !c.nbhd(c.full, x, c.full, false, variant) {
                return refute(
                    sys,
                    instances,
                    format!("{} or U' is not a neighbourhood of {}", c.set(x), c.set(x)),
                );
            }
            let nbhds: Vec<u32> = (0..=c.full)
                .filter(|y| y & x == x && c.nbhd(*y, x, c.full, false, variant))
                .collect();
            let lookup: BTreeSet<u32> = nbhds.iter().copied().collect();
            for a in &nbhds {
                for b in &nbhds {
                    instances += 1;
                    if !lookup.contains(&(a | b)) || !lookup.contains(&(a & b)) {
                        return refute(
                            sys,
                            instances,
                            format!(
                                "neighbourhoods {} and {} of {} are not closed under union/intersection",
                                c.set(*a),
                                c.set(*b),
                                c.set(x)
                            ),
                        );
                    }
                }
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_closed_best_ui(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && best & !x == 0 && c.closed(x, c.full, Variant::Set),
        |x| c.ui(x),
        "closed and contains the best elements but is not a union of intersections",
    )
}

fn chk_closed_best_imp_nbhd(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && best & !x == 0 && c.closed(x, c.full, Variant::Set),
        |x| c.nbhd(x, best, c.full, true, Variant::Set),
        "closed and contains the best elements but is not an improving neighbourhood",
    )
}

fn chk_ui_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    implication(
        sys,
        &c,
        |x| c.ui(x),
        |x| c.closed(x, c.full, Variant::Set),
        "a union of intersections but not downward closed",
    )
}

fn chk_d_o_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    implication(
        sys,
        &c,
        |x| c.d_o(x, c.full),
        |x| c.closed(x, c.full, Variant::Set),
        "in D(O) but not downward closed",
    )
}

fn chk_d_o_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && c.d_o(x, c.full),
        |x| best & !x == 0,
        "in D(O) but missing a best element",
    )
}

fn chk_imp_nbhd_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| best & !x == 0 && c.nbhd(x, best, c.full, true, Variant::Set),
        |x| c.closed(x, c.full, Variant::Set),
        "an improving neighbourhood of the best elements but not closed",
    )
}

fn chk_imp_nbhd_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| best & !x == 0 && c.nbhd(x, best, c.full, true, Variant::Set),
        |x| best & !x == 0,
        "an improving neighbourhood that misses a best element",
    )
}

fn chk_indep_closed_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| best & !x == 0,
        "independent system: closed but missing a best element",
    )
}

fn chk_indep_closed_cp(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| c.cp(x, c.full, Variant::Set),
        "independent system: closed but not ceteris paribus improving",
    )
}

fn chk_indep_closed_ui(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| c.ui(x),
        "independent system: closed but not a union of intersections",
    )
}

fn chk_indep_closed_d_o(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| c.d_o(x, c.full),
        "independent system: closed but not in D(O)",
    )
}

fn chk_indep_closed_nbhd(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| {
            best & !x == 0
                && c.nbhd(x, best, c.full, false, Variant::Set)
                && c.nbhd(x, best, c.full, true, Variant::Set)
        },
        "independent system: closed but not a neighbourhood of the best elements",
    )
}

fn chk_indep_nbhd_closed(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| best & !x == 0 && c.nbhd(x, best, c.full, false, Variant::Set),
        |x| c.closed(x, c.full, Variant::Set),
        "independent system: a neighbourhood of the best elements but not closed",
    )
}

fn chk_int_union(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let masks = subset_masks(c.len());
    let closed: Vec<u32> =
        masks.iter().copied().filter(|x| c.closed(*x, c.full, Variant::Set)).collect();
    let ui: Vec<u32> = masks.iter().copied().filter(|x| c.ui(*x)).collect();
    let mut instances = 0u64;
    for (family, is_member, label) in [
        (&closed, &(|x: u32| c.closed(x, c.full, Variant::Set)) as &dyn Fn(u32) -> bool, "closed"),
        (&ui, &(|x: u32| c.ui(x)) as &dyn Fn(u32) -> bool, "union-of-intersections"),
    ] {
        for a in family.iter() {
            for b in family.iter() {
                instances += 1;
                if !is_member(a | b) || !is_member(a & b) {
                    return refute(
                        sys,
                        instances,
                        format!(
                            "{label} sets {} and {} are not closed under union/intersection",
                            c.set(*a),
                            c.set(*b)
                        ),
                    );
                }
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_relativization_closure(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let closed: Vec<u32> = subset_masks(c.len())
        .into_iter()
        .filter(|x| c.closed(*x, c.full, Variant::Set))
        .collect();
    let mut instances = 0u64;
    for x in &closed {
        for v in 0..=c.full {
            instances += 1;
            if !c.closed(x & v, v, Variant::Set) {
                return refute(
                    sys,
                    instances,
                    format!("closed {} loses closure in {}", c.set(*x), c.set(v)),
                );
            }
        }
    }
    Outcome::ok(instances)
}

fn chk_garbage_in(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    let quality = sys.derived_quality(Variant::Set);
    let options = CheckOptions { require_nontrivial: false, ..CheckOptions::default() };
    let mut instances = 0u64;
    for (name, set) in sys.obligation_names().iter().zip(sys.obligation_sets()) {
        instances += 1;
        let x = set.intersection(sys.restriction());
        let verdict = check_hard_obligation(&x, sys, &quality, &options)
            .expect("candidates come from the restriction");
        if !verdict.accept() {
            return refute(
                sys,
                instances,
                format!("independent system: basic obligation {name} is not derived back"),
            );
        }
    }
    Outcome::ok(instances)
}

fn chk_classical_consequence(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    if !c.independent() {
        return Outcome::ok(0);
    }
    let quality = sys.derived_quality(Variant::Set);
    let options = CheckOptions { require_nontrivial: false, ..CheckOptions::default() };
    let derived = derive_obligations(sys, &quality, &options, None)
        .expect("pool universes stay within the derivation cap");
    let mut instances = 0u64;
    for (x, _) in &derived.items {
        instances += 1;
        if !is_classical_consequence(x, sys).expect("derived sets stay inside the restriction") {
            return refute(
                sys,
                instances,
                format!("derived obligation {x} does not follow from the conjunction"),
            );
        }
    }
    Outcome::ok(instances)
}

/// The library's exhaustive derivation must coincide with an independently
/// computed acceptance sweep.
fn chk_derive_oracle(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let quality = sys.derived_quality(Variant::Set);
    let options = CheckOptions::default();
    let derived = derive_obligations(sys, &quality, &options, None)
        .expect("pool universes stay within the derivation cap");
    let library: Vec<ModelSet> = derived.items.iter().map(|(x, _)| x.clone()).collect();
    let best = c.best(c.full, Variant::Set);
    let mut oracle: Vec<ModelSet> = Vec::new();
    let mut instances = 0u64;
    for x in subset_masks(c.len()) {
        instances += 1;
        let accept = x != 0
            && x != c.full
            && best & !x == 0
            && c.closed(x, c.full, Variant::Set)
            && c.nbhd(x, best, c.full, true, Variant::Set);
        if accept {
            oracle.push(c.set(x));
        }
    }
    oracle.sort_by_key(|s| (s.len(), s.clone()));
    if library != oracle {
        return refute(
            sys,
            instances,
            format!(
                "library derivation [{}] differs from the oracle [{}]",
                library.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
                oracle.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
            ),
        );
    }
    Outcome::ok(instances)
}

fn ref_closed_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && c.closed(x, c.full, Variant::Set),
        |x| best & !x == 0,
        "closed but missing a best element",
    )
}

fn ref_closed_best_cp(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && best & !x == 0 && c.closed(x, c.full, Variant::Set),
        |x| c.cp(x, c.full, Variant::Set),
        "closed, contains the best elements, yet not ceteris paribus improving",
    )
}

fn ref_closed_best_nbhd(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && best & !x == 0 && c.closed(x, c.full, Variant::Set),
        |x| c.nbhd(x, best, c.full, false, Variant::Set),
        "closed, contains the best elements, yet not a plain neighbourhood of them",
    )
}

fn ref_closed_best_d_o(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && best & !x == 0 && c.closed(x, c.full, Variant::Set),
        |x| c.d_o(x, c.full),
        "closed, contains the best elements, yet outside D(O)",
    )
}

fn ref_ui_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    implication(
        sys,
        &c,
        |x| x != 0 && c.ui(x),
        |x| best & !x == 0,
        "a union of intersections missing a best element",
    )
}

fn ref_cp_count_imp_nbhd(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Count);
    implication(
        sys,
        &c,
        |x| x != 0 && c.cp(x, c.full, Variant::Count),
        |x| best & !x == 0 && c.nbhd(x, best, c.full, true, Variant::Count),
        "counting-improving but not an improving neighbourhood of the best elements",
    )
}

fn ref_relativization_best(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let best = c.best(c.full, Variant::Set);
    let mut instances = 0u64;
    for x in subset_masks(c.len()) {
        if best & !x != 0 {
            continue;
        }
        for v in 1..=c.full {
            instances += 1;
            if c.best(v, Variant::Set) & !(x & v) != 0 {
                return refute(
                    sys,
                    instances,
                    format!(
                        "X={} contains the best elements of U' but misses those of {}",
                        c.set(x),
                        c.set(v)
                    ),
                );
            }
        }
    }
    Outcome::ok(instances)
}

fn ref_relativization_d_o(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let mut instances = 0u64;
    for x in subset_masks(c.len()) {
        if x == 0 || !c.d_o(x, c.full) {
            continue;
        }
        for v in 1..=c.full {
            instances += 1;
            if !c.d_o(x & v, v) {
                return refute(
                    sys,
                    instances,
                    format!("X={} is in D(O) over U' but not over {}", c.set(x), c.set(v)),
                );
            }
        }
    }
    Outcome::ok(instances)
}

fn ref_relativization_local(sys: &ObligationSystem) -> Outcome {
    let c = MaskCtx::obligations(sys);
    let mut instances = 0u64;
    for x in subset_masks(c.len()) {
        if x == 0 || !c.cp(x, c.full, Variant::Count) {
            continue;
        }
        for v in 1..=c.full {
            instances += 1;
            if !c.cp(x & v, v, Variant::Count) {
                return refute(
                    sys,
                    instances,
                    format!(
                        "X={} is counting-improving over U' but {} is not over {}",
                        c.set(x),
                        c.set(x & v),
                        c.set(v)
                    ),
                );
            }
        }
    }
    Outcome::ok(instances)
}

// ---------------------------------------------------------------------------
// Registry and drivers
// ---------------------------------------------------------------------------

pub fn registry() -> Vec<Claim> {
    use Kind::{Golden, System};
    use Status::{Refutable, Theorem};
    let claim = |id, description, status, kind| Claim { id, description, status, kind };
    vec![
        claim("example-count", "counting distances and ranking of the three-world example", Theorem, Golden(golden_count)),
        claim("example-dependent-1", "a closed set may miss one of two incomparable ideals", Theorem, Golden(golden_dependent_1)),
        claim("example-dependent-2", "accepted obligation that fails the ceteris paribus and D(O) tests", Theorem, Golden(golden_dependent_2)),
        claim("example-dependent-3", "improving neighbourhood despite a leaking plain geodesic", Theorem, Golden(golden_dependent_3)),
        claim("example-not-global", "counting-improving set that is neither closed nor a neighbourhood", Theorem, Golden(golden_not_global)),
        claim("example-h-n-local", "improving neighbourhood that is not locally better (counting)", Theorem, Golden(golden_h_n_local)),
        claim("example-burnt-letter", "the Ross weakening fails downward closure with witness (01, 00)", Theorem, Golden(golden_burnt_letter)),
        claim("example-considerate-assassin", "soft acceptance with exactly one tolerated closure exception", Theorem, Golden(golden_assassin)),
        claim("product-pref", "the product of preferential size notions is generated by the rectangle of generators", Theorem, Golden(golden_product_pref)),
        claim("distance-laws", "identity, symmetry and the triangle law in both variants", Theorem, System(chk_distance_laws)),
        claim("between-laws", "intervals equal the agreement set, split distances disjointly, and are symmetric", Theorem, System(chk_between_laws)),
        claim("interval-strongest-formula", "variable-distance intervals are the models of the strongest common conjunction", Theorem, System(chk_interval_formula)),
        claim("subset-closure", "downward closure restricts to subsets and lifts through closed intermediates", Theorem, System(chk_subset_closure)),
        claim("quality-distance", "profile quality and set distances interlock (surplus, chains, sandwiches)", Theorem, System(chk_quality_distance)),
        claim("local-implies-closed", "ceteris paribus improving sets are downward closed (set variant)", Theorem, System(chk_local_implies_closed)),
        claim("cp-implies-contains-best", "ceteris paribus improving sets contain every best element", Theorem, System(chk_cp_implies_best)),
        claim("count-closed-implies-cp", "counting-closed sets are ceteris paribus improving (counting)", Theorem, System(chk_count_closed)),
        claim("neighbourhood-union-intersection", "neighbourhoods of a point include it, exhaust U', and form a lattice", Theorem, System(chk_neighbourhood_algebra)),
        claim("closed-best-implies-ui", "closed sets containing the best elements are unions of intersections", Theorem, System(chk_closed_best_ui)),
        claim("closed-best-implies-improving-neighbourhood", "closed sets containing the best elements are improving neighbourhoods", Theorem, System(chk_closed_best_imp_nbhd)),
        claim("ui-implies-closed", "unions of intersections are downward closed", Theorem, System(chk_ui_closed)),
        claim("d-o-implies-closed", "members of D(O) are downward closed", Theorem, System(chk_d_o_closed)),
        claim("d-o-implies-contains-best", "nonempty members of D(O) contain every best element", Theorem, System(chk_d_o_best)),
        claim("improving-neighbourhood-implies-closed", "improving neighbourhoods of the best elements are downward closed", Theorem, System(chk_imp_nbhd_closed)),
        claim("improving-neighbourhood-implies-contains-best", "improving neighbourhoods of the best elements contain them", Theorem, System(chk_imp_nbhd_best)),
        claim("independent-closed-implies-best", "independent obligations: closed sets contain the best elements", Theorem, System(chk_indep_closed_best)),
        claim("independent-closed-implies-cp", "independent obligations: closed sets improve ceteris paribus", Theorem, System(chk_indep_closed_cp)),
        claim("independent-closed-implies-ui", "independent obligations: closed sets are unions of intersections", Theorem, System(chk_indep_closed_ui)),
        claim("independent-closed-implies-d-o", "independent obligations: closed sets belong to D(O)", Theorem, System(chk_indep_closed_d_o)),
        claim("independent-closed-implies-neighbourhood", "independent obligations: closed sets are (improving) neighbourhoods of the best elements", Theorem, System(chk_indep_closed_nbhd)),
        claim("independent-neighbourhood-implies-closed", "independent obligations: neighbourhoods of the best elements are closed", Theorem, System(chk_indep_nbhd_closed)),
        claim("int-union", "closed sets and unions of intersections are stable under union and intersection", Theorem, System(chk_int_union)),
        claim("relativization-closure", "downward closure survives restriction of the universe", Theorem, System(chk_relativization_closure)),
        claim("garbage-in", "independent obligations: every basic obligation is derived back", Theorem, System(chk_garbage_in)),
        claim("classical-consequence", "independent obligations: derived obligations follow classically from the conjunction", Theorem, System(chk_classical_consequence)),
        claim("derive-oracle", "exhaustive derivation agrees with an independent acceptance sweep", Theorem, System(chk_derive_oracle)),
        claim("closed-implies-contains-best", "downward closure alone forces the best elements in", Refutable, System(ref_closed_best)),
        claim("closed-best-implies-cp", "closed sets with the best elements improve ceteris paribus (set variant)", Refutable, System(ref_closed_best_cp)),
        claim("closed-best-implies-neighbourhood", "closed sets with the best elements are plain neighbourhoods of them", Refutable, System(ref_closed_best_nbhd)),
        claim("closed-best-implies-d-o", "closed sets with the best elements belong to D(O)", Refutable, System(ref_closed_best_d_o)),
        claim("ui-implies-contains-best", "unions of intersections contain the best elements", Refutable, System(ref_ui_best)),
        claim("cp-count-implies-improving-neighbourhood", "counting-improving sets are improving neighbourhoods of the best elements", Refutable, System(ref_cp_count_imp_nbhd)),
        claim("relativization-best", "containing the best elements survives restriction of the universe", Refutable, System(ref_relativization_best)),
        claim("relativization-d-o", "membership in D(O) survives restriction of the universe", Refutable, System(ref_relativization_d_o)),
        claim("relativization-local", "ceteris paribus improvement (counting) survives restriction of the universe", Refutable, System(ref_relativization_local)),
        claim("ross-derivable", "the weakening 'p or not-q' is a derived obligation of {p, q}", Refutable, Golden(golden_ross)),
    ]
}

/// Evaluate one claim against a pool. Theorems without a budget sweep the
/// whole pool in parallel; refutable or budgeted runs scan in pool order and
/// stop at the first counterexample, so the smallest one is reported.
pub fn evaluate_claim(
    claim: &Claim,
    pool: &[ObligationSystem],
    seed: u64,
    budget: Option<u64>,
) -> SearchReport {
    let start = Instant::now();
    let (instances, counterexamples, counterexample) = match &claim.kind {
        Kind::Golden(f) => match f() {
            Ok(n) => (n, 0, None),
            Err(e) => (1, 1, Some(e)),
        },
        Kind::System(f) => match (claim.status, budget) {
            (Status::Theorem, None) => {
                let outs: Vec<Outcome> = pool.par_iter().map(f).collect();
                let instances = outs.iter().map(|o| o.instances).sum();
                let counterexamples =
                    outs.iter().filter(|o| o.counterexample.is_some()).count() as u64;
                let first = outs.into_iter().find_map(|o| o.counterexample);
                (instances, counterexamples, first)
            }
            _ => {
                let mut instances = 0u64;
                let mut found = None;
                for sys in pool {
                    let out = f(sys);
                    instances += out.instances;
                    if out.counterexample.is_some() {
                        found = out.counterexample;
                        break;
                    }
                    if budget.is_some_and(|b| instances >= b) {
                        break;
                    }
                }
                (instances, u64::from(found.is_some()), found)
            }
        },
    };
    let ok = (claim.status == Status::Theorem) == counterexample.is_none();
    SearchReport {
        claim: claim.id.to_string(),
        status: claim.status,
        ok,
        instances,
        counterexamples,
        counterexample,
        seed,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// How many seeded random systems the full suite appends to the exhaustive
/// phase.
pub const SUITE_RANDOM_SYSTEMS: usize = 1000;

/// Verify the whole claim registry, one report per claim.
pub fn run_paper_suite(seed: u64) -> Vec<SearchReport> {
    let pool = system_pool(seed, SUITE_RANDOM_SYSTEMS, 4, 4);
    registry().iter().map(|claim| evaluate_claim(claim, &pool, seed, None)).collect()
}

/// Search for a counterexample to one claim within an instance budget.
/// Refutable claims must produce one; theorems report a clean sweep.
pub fn search_counterexample(
    claim_id: &str,
    budget: u64,
    seed: u64,
) -> Result<SearchReport, LabError> {
    if budget == 0 {
        return Err(LabError::BadParameters("the budget must be positive".to_string()));
    }
    let claim = registry()
        .into_iter()
        .find(|c| c.id == claim_id)
        .ok_or_else(|| LabError::UnknownClaim(claim_id.to_string()))?;
    let pool = system_pool(seed, SUITE_RANDOM_SYSTEMS, 4, 4);
    let report = evaluate_claim(&claim, &pool, seed, Some(budget));
    if claim.status == Status::Refutable && report.counterexample.is_none() {
        return Err(LabError::BudgetExhausted { claim: claim.id.to_string(), budget });
    }
    Ok(report)
}
