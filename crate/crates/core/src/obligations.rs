//! Obligation systems and system-level predicates: δ-validity, independence,
//! (ui), D(𝒪), the hard and soft derived-obligation checks, and exhaustive
//! derivation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::metric::{closest, interval, IndexFamily, Variant};
use crate::model::{Model, ModelSet, Vocabulary};
use crate::quality::{
    best_elements, ceteris_paribus_improving, is_downward_closed, softly_locally_better,
    ClosureWitness, LocalWitness, QualityError, QualityRelation,
};
use crate::size::{product_relation, SizeError, SizeSpec};

/// `D(𝒪)` iterates over `3^|𝒪|` partial assignments.
pub const MAX_DELTA_OBLIGATIONS: usize = 12;

/// Exhaustive derivation enumerates all `2^|U′|` subsets.
pub const MAX_DERIVE_UNIVERSE: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum ObligationError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("invalid obligation system: {0}")]
    BadSystem(String),
    #[error("{0} obligations exceed the cap of {MAX_DELTA_OBLIGATIONS} for assignment enumeration")]
    TooManyObligations(usize),
    #[error("a universe of {0} models exceeds the cap of {MAX_DERIVE_UNIVERSE} for exhaustive derivation")]
    UniverseTooLarge(usize),
    #[error(transparent)]
    Quality(#[from] QualityError),
    #[error(transparent)]
    Size(#[from] SizeError),
}

/// A vocabulary together with a working universe `U′` and a named family of
/// basic obligations, each a model set over the full universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationSystem {
    vocab: Vocabulary,
    restriction: ModelSet,
    names: Vec<String>,
    sets: Vec<ModelSet>,
}

impl ObligationSystem {
    pub fn new(
        vocab: Vocabulary,
        restriction: ModelSet,
        obligations: Vec<(String, ModelSet)>,
    ) -> Result<Self, ObligationError> {
        if restriction.is_empty() {
            return Err(ObligationError::BadSystem("the restriction U' is empty".to_string()));
        }
        if restriction.width() != vocab.len() {
            return Err(ObligationError::BadSystem(format!(
                "restriction width {} does not match the vocabulary size {}",
                restriction.width(),
                vocab.len()
            )));
        }
        let mut names = Vec::new();
        let mut sets = Vec::new();
        let mut seen = BTreeSet::new();
        for (name, set) in obligations {
            if !seen.insert(name.clone()) {
                return Err(ObligationError::BadSystem(format!(
                    "duplicate obligation name `{name}`"
                )));
            }
            if set.width() != vocab.len() {
                return Err(ObligationError::BadSystem(format!(
                    "obligation `{name}` has width {}, expected {}",
                    set.width(),
                    vocab.len()
                )));
            }
            names.push(name);
            sets.push(set);
        }
        Ok(ObligationSystem { vocab, restriction, names, sets })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// The full universe of `2^n` models.
    pub fn universe(&self) -> ModelSet {
        self.vocab.universe()
    }

    /// The working universe `U′`.
    pub fn restriction(&self) -> &ModelSet {
        &self.restriction
    }

    pub fn obligation_names(&self) -> &[String] {
        &self.names
    }

    pub fn obligation_sets(&self) -> &[ModelSet] {
        &self.sets
    }

    pub fn family(&self) -> IndexFamily<'_> {
        IndexFamily::Obligations(&self.sets)
    }

    /// The quality preorder derived from the obligation profiles.
    pub fn derived_quality(&self, variant: Variant) -> QualityRelation {
        match variant {
            Variant::Set => QualityRelation::derived_set(&self.sets),
            Variant::Count => QualityRelation::derived_count(&self.sets),
        }
    }

    fn check_candidate(&self, x: &ModelSet) -> Result<(), ObligationError> {
        if !x.is_subset(&self.restriction) {
            return Err(ObligationError::PreconditionViolation(format!(
                "candidate {x} is not a subset of U' = {}",
                self.restriction
            )));
        }
        Ok(())
    }
}

/// A partial truth assignment to the obligation family: obligation index →
/// required membership.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeltaAssignment {
    values: BTreeMap<usize, bool>,
}

impl DeltaAssignment {
    pub fn new<I: IntoIterator<Item = (usize, bool)>>(values: I) -> Self {
        DeltaAssignment { values: values.into_iter().collect() }
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.values.get(&index).copied()
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let items: Vec<String> = self
            .values
            .iter()
            .map(|(i, v)| format!("{}={}", names[*i], u8::from(*v)))
            .collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// `m ⊨ δ`: membership agrees with δ on every obligation in its domain.
pub fn satisfies_delta(m: &Model, delta: &DeltaAssignment, obligations: &[ModelSet]) -> bool {
    delta.values.iter().all(|(i, v)| obligations[*i].contains(m) == *v)
}

/// Whether every full 0/1 assignment to the obligation family is realized by
/// a model of `U′`; on failure the first unrealized assignment is returned.
pub fn is_independent(sys: &ObligationSystem) -> Result<Option<DeltaAssignment>, ObligationError> {
    let k = sys.sets.len();
    if k > MAX_DELTA_OBLIGATIONS {
        return Err(ObligationError::TooManyObligations(k));
    }
    for bits in (0u32..1 << k).rev() {
        let delta = DeltaAssignment::new((0..k).map(|i| (i, bits & (1 << i) != 0)));
        if !sys.restriction.iter().any(|m| satisfies_delta(&m, &delta, &sys.sets)) {
            return Ok(Some(delta));
        }
    }
    Ok(None)
}

/// Outcome of the (ui) test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UiOutcome {
    pub holds: bool,
    /// The canonical candidate `(∪_{m∈X} ∩𝒪(m)) ∩ U′`; always a superset of
    /// `X`, and equal to it exactly when (ui) holds.
    pub candidate: ModelSet,
}

/// Whether `X` is a union of intersections of basic obligations,
/// relativized to `U′`. The empty intersection is the full universe.
pub fn is_ui(x: &ModelSet, sys: &ObligationSystem) -> Result<UiOutcome, ObligationError> {
    sys.check_candidate(x)?;
    let universe = sys.universe();
    let mut candidate = ModelSet::empty(x.width());
    for m in x.iter() {
        let mut inter = universe.clone();
        for set in &sys.sets {
            if set.contains(&m) {
                inter = inter.intersection(set);
            }
        }
        candidate = candidate.union(&inter);
    }
    candidate = candidate.intersection(&sys.restriction);
    Ok(UiOutcome { holds: candidate.is_subset(x), candidate })
}

/// Witness that `X ∉ D(𝒪)`: both models satisfy δ, `inside ∈ X`,
/// `outside ∉ X`, and no member of `X` satisfying δ is strictly `≺_s`-better
/// than `outside`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaWitness {
    pub delta: DeltaAssignment,
    pub inside: Model,
    pub outside: Model,
}

/// Whether `X ∈ D(𝒪)`: models satisfy obligations independently, i.e. from
/// any δ-constrained outside point with a δ-companion inside one can move
/// inside while strictly improving. `None` means membership holds.
pub fn in_d_o(
    x: &ModelSet,
    sys: &ObligationSystem,
) -> Result<Option<DeltaWitness>, ObligationError> {
    sys.check_candidate(x)?;
    let k = sys.sets.len();
    if k > MAX_DELTA_OBLIGATIONS {
        return Err(ObligationError::TooManyObligations(k));
    }
    let quality = sys.derived_quality(Variant::Set);
    // Trits: 0 = outside the domain, 1 = required false, 2 = required true.
    let mut trits = vec![0u8; k];
    loop {
        let delta = DeltaAssignment::new(
            trits.iter().enumerate().filter(|(_, t)| **t != 0).map(|(i, t)| (i, *t == 2)),
        );
        let inside: Vec<Model> = x.iter().filter(|m| satisfies_delta(m, &delta, &sys.sets)).collect();
        if !inside.is_empty() {
            for outside in sys.restriction.iter() {
                if x.contains(&outside) || !satisfies_delta(&outside, &delta, &sys.sets) {
                    continue;
                }
                if !inside.iter().any(|m| quality.strictly_better(m, &outside)) {
                    return Ok(Some(DeltaWitness { delta, inside: inside[0], outside }));
                }
            }
        }
        // Advance the base-3 counter.
        let mut i = 0;
        loop {
            if i == k {
                return Ok(None);
            }
            trits[i] += 1;
            if trits[i] < 3 {
                break;
            }
            trits[i] = 0;
            i += 1;
        }
    }
}

/// `(∩𝒪) ∩ U′ ⊆ X`: the candidate follows classically from the conjunction
/// of all basic obligations.
pub fn is_classical_consequence(
    x: &ModelSet,
    sys: &ObligationSystem,
) -> Result<bool, ObligationError> {
    sys.check_candidate(x)?;
    let mut inter = sys.universe();
    for set in &sys.sets {
        inter = inter.intersection(set);
    }
    Ok(inter.intersection(&sys.restriction).is_subset(x))
}

/// Knobs for the derived-obligation checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub variant: Variant,
    /// Require ceteris paribus improvement (criterion 1.4).
    pub require_cp: bool,
    /// Require `∅ ≠ X ≠ U′`.
    pub require_nontrivial: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { variant: Variant::Set, require_cp: false, require_nontrivial: true }
    }
}

/// A failed interval containment in the improving-neighbourhood criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NbhdWitness {
    pub member: Model,
    pub ideal: Model,
    /// A model between `ideal` and `member` that escapes the candidate.
    pub escape: Model,
}

impl fmt::Display for NbhdWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lies between {} and {} but escapes the set",
            self.escape, self.ideal, self.member
        )
    }
}

fn improving_nbhd_witness(
    x: &ModelSet,
    ideals: &ModelSet,
    ambient: &ModelSet,
    variant: Variant,
    fam: &IndexFamily,
    quality: &QualityRelation,
) -> Option<NbhdWitness> {
    for member in x.iter() {
        let not_worse = ModelSet::from_models(
            x.width(),
            ideals.iter().filter(|i| quality.at_least_as_good(i, &member)),
        )
        .expect("ideals share the width");
        for ideal in closest(&member, &not_worse, variant, fam).iter() {
            let iv = interval(&ideal, &member, ambient, variant, fam);
            let escape = iv.iter().find(|m| !x.contains(m));
            if let Some(escape) = escape {
                return Some(NbhdWitness { member, ideal, escape });
            }
        }
    }
    None
}

/// Per-criterion outcome of the hard derived-obligation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationVerdict {
    pub contains_ideal: bool,
    pub missing_ideal: Option<Model>,
    pub downward_closed: bool,
    pub closure_witness: Option<ClosureWitness>,
    pub improving_neighbourhood: bool,
    pub neighbourhood_witness: Option<NbhdWitness>,
    pub ceteris_paribus: bool,
    pub cp_witness: Option<LocalWitness>,
    pub nontrivial: bool,
    /// Informational only; Definition 5.1 does not require (ui).
    pub ui: bool,
    pub require_cp: bool,
    pub require_nontrivial: bool,
}

impl ObligationVerdict {
    pub fn accept(&self) -> bool {
        self.contains_ideal
            && self.downward_closed
            && self.improving_neighbourhood
            && (!self.require_cp || self.ceteris_paribus)
            && (!self.require_nontrivial || self.nontrivial)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "accept": self.accept(),
            "contains_ideal": self.contains_ideal,
            "missing_ideal": self.missing_ideal.map(|m| m.to_string()),
            "downward_closed": self.downward_closed,
            "closure_witness": self.closure_witness.map(|w| json!({
                "better": w.better.to_string(),
                "member": w.member.to_string(),
            })),
            "improving_neighbourhood": self.improving_neighbourhood,
            "neighbourhood_witness": self.neighbourhood_witness.map(|w| json!({
                "member": w.member.to_string(),
                "ideal": w.ideal.to_string(),
                "escape": w.escape.to_string(),
            })),
            "ceteris_paribus": self.ceteris_paribus,
            "ceteris_paribus_required": self.require_cp,
            "nontrivial": self.nontrivial,
            "nontrivial_required": self.require_nontrivial,
            "ui": self.ui,
        })
    }
}

impl fmt::Display for ObligationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "verdict: {}", if self.accept() { "accept" } else { "reject" })?;
        write!(f, "  contains ideal cases: {}", mark(self.contains_ideal))?;
        if let Some(m) = self.missing_ideal {
            write!(f, " (missing {m})")?;
        }
        writeln!(f)?;
        write!(f, "  downward closed: {}", mark(self.downward_closed))?;
        if let Some(w) = self.closure_witness {
            write!(f, " ({w})")?;
        }
        writeln!(f)?;
        write!(f, "  improving neighbourhood: {}", mark(self.improving_neighbourhood))?;
        if let Some(w) = self.neighbourhood_witness {
            write!(f, " ({w})")?;
        }
        writeln!(f)?;
        write!(
            f,
            "  ceteris paribus improving{}: {}",
            if self.require_cp { "" } else { " (not required)" },
            mark(self.ceteris_paribus)
        )?;
        if let Some(w) = self.cp_witness {
            write!(f, " ({w})")?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "  nontrivial{}: {}",
            if self.require_nontrivial { "" } else { " (not required)" },
            mark(self.nontrivial)
        )?;
        write!(f, "  union of intersections (informational): {}", if self.ui { "yes" } else { "no" })
    }
}

/// The hard derived-obligation check of Definition 5.1.
pub fn check_hard_obligation(
    x: &ModelSet,
    sys: &ObligationSystem,
    quality: &QualityRelation,
    options: &CheckOptions,
) -> Result<ObligationVerdict, ObligationError> {
    sys.check_candidate(x)?;
    let ambient = &sys.restriction;
    let fam = sys.family();
    let best = best_elements(ambient, quality)?;

    let missing_ideal = best.iter().find(|b| !x.contains(b));
    let contains_ideal = missing_ideal.is_none();

    let closure_witness = is_downward_closed(x, ambient, quality)?;

    let (improving_neighbourhood, neighbourhood_witness) = if contains_ideal {
        match improving_nbhd_witness(x, &best, ambient, options.variant, &fam, quality) {
            Some(w) => (false, Some(w)),
            None => (true, None),
        }
    } else {
        // Not a neighbourhood of the best elements if some are missing.
        (false, None)
    };

    let cp_witness = ceteris_paribus_improving(x, ambient, quality, options.variant, &fam)?;

    Ok(ObligationVerdict {
        contains_ideal,
        missing_ideal,
        downward_closed: closure_witness.is_none(),
        closure_witness,
        improving_neighbourhood,
        neighbourhood_witness,
        ceteris_paribus: cp_witness.is_none(),
        cp_witness,
        nontrivial: !x.is_empty() && x != ambient,
        ui: is_ui(x, sys)?.holds,
        require_cp: options.require_cp,
        require_nontrivial: options.require_nontrivial,
    })
}

/// Output of exhaustive derivation, in canonical order (cardinality, then
/// bitstring-lexicographic).
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub items: Vec<(ModelSet, ObligationVerdict)>,
    pub truncated: bool,
    pub candidates_checked: usize,
}

/// All derived obligations of the system: the subsets of `U′` accepted by
/// `check_hard_obligation`. Enumeration is pruned to downward-closed
/// supersets of the best elements, which criteria 1.1 and 1.2 force anyway.
pub fn derive_obligations(
    sys: &ObligationSystem,
    quality: &QualityRelation,
    options: &CheckOptions,
    limit: Option<usize>,
) -> Result<Derivation, ObligationError> {
    let ambient = &sys.restriction;
    if ambient.len() > MAX_DERIVE_UNIVERSE {
        return Err(ObligationError::UniverseTooLarge(ambient.len()));
    }
    let elems: Vec<Model> = ambient.iter().collect();
    let best = best_elements(ambient, quality)?;
    let best_mask: u32 = elems
        .iter()
        .enumerate()
        .filter(|(_, m)| best.contains(m))
        .fold(0, |acc, (i, _)| acc | 1 << i);

    let masks: Vec<u32> = (0u32..1 << elems.len())
        .filter(|mask| mask & best_mask == best_mask)
        .collect();
    let candidates_checked = masks.len();
    let mut items: Vec<(ModelSet, ObligationVerdict)> = masks
        .into_par_iter()
        .map(|mask| -> Result<Option<(ModelSet, ObligationVerdict)>, ObligationError> {
            let x = ModelSet::from_models(
                ambient.width(),
                elems.iter().enumerate().filter(|(i, _)| mask & 1 << i != 0).map(|(_, m)| *m),
            )
            .expect("members come from the restriction");
            if is_downward_closed(&x, ambient, quality)?.is_some() {
                return Ok(None);
            }
            let verdict = check_hard_obligation(&x, sys, quality, options)?;
            Ok(verdict.accept().then_some((x, verdict)))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    items.sort_by_key(|(x, _)| (x.len(), x.clone()));

    let truncated = limit.is_some_and(|cap| items.len() > cap);
    if let Some(cap) = limit {
        items.truncate(cap);
    }
    Ok(Derivation { items, truncated, candidates_checked })
}

/// Per-criterion outcome of the soft check, with exception sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftVerdict {
    pub ideal_ok: bool,
    pub ideal_exceptions: ModelSet,
    pub downward_closed: bool,
    /// Exceptions are `(better, member)` pairs with nothing strictly between.
    pub closure_exceptions: Vec<(Model, Model)>,
    pub improving_neighbourhood: bool,
    /// Exceptions are `(member, ideal)` pairs whose interval escapes.
    pub neighbourhood_exceptions: Vec<(Model, Model)>,
    pub ceteris_paribus: bool,
    pub cp_exceptions: ModelSet,
    pub nontrivial: bool,
    pub require_cp: bool,
    pub require_nontrivial: bool,
}

impl SoftVerdict {
    pub fn accept(&self) -> bool {
        self.ideal_ok
            && self.downward_closed
            && self.improving_neighbourhood
            && (!self.require_cp || self.ceteris_paribus)
            && (!self.require_nontrivial || self.nontrivial)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs = |v: &[(Model, Model)]| {
            v.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>()
        };
        json!({
            "accept": self.accept(),
            "contains_ideal": self.ideal_ok,
            "ideal_exceptions": self.ideal_exceptions.bitstrings(),
            "downward_closed": self.downward_closed,
            "closure_exceptions": pairs(&self.closure_exceptions),
            "improving_neighbourhood": self.improving_neighbourhood,
            "neighbourhood_exceptions": pairs(&self.neighbourhood_exceptions),
            "ceteris_paribus": self.ceteris_paribus,
            "ceteris_paribus_required": self.require_cp,
            "cp_exceptions": self.cp_exceptions.bitstrings(),
            "nontrivial": self.nontrivial,
            "nontrivial_required": self.require_nontrivial,
        })
    }
}

impl fmt::Display for SoftVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        let pairs = |v: &[(Model, Model)]| {
            let items: Vec<String> = v.iter().map(|(a, b)| format!("({a}, {b})")).collect();
            format!("{{{}}}", items.join(", "))
        };
        writeln!(f, "soft verdict: {}", if self.accept() { "accept" } else { "reject" })?;
        writeln!(
            f,
            "  contains ideal cases: {} exceptions {}",
            mark(self.ideal_ok),
            self.ideal_exceptions
        )?;
        writeln!(
            f,
            "  downward closed: {} exceptions {}",
            mark(self.downward_closed),
            pairs(&self.closure_exceptions)
        )?;
        writeln!(
            f,
            "  improving neighbourhood: {} exceptions {}",
            mark(self.improving_neighbourhood),
            pairs(&self.neighbourhood_exceptions)
        )?;
        writeln!(
            f,
            "  ceteris paribus improving{}: {} exceptions {}",
            if self.require_cp { "" } else { " (not required)" },
            mark(self.ceteris_paribus),
            self.cp_exceptions
        )?;
        write!(
            f,
            "  nontrivial{}: {}",
            if self.require_nontrivial { "" } else { " (not required)" },
            mark(self.nontrivial)
        )
    }
}

/// Lift a size notion on models to ordered pairs of models: fractions keep
/// their budget, generators go to the product generator.
fn pair_spec(size: &SizeSpec<Model>, carrier: &BTreeSet<Model>) -> SizeSpec<(Model, Model)> {
    match size {
        SizeSpec::Fraction(eps) => SizeSpec::Fraction(*eps),
        SizeSpec::Ideal(generator) => SizeSpec::Ideal(
            generator
                .iter()
                .flat_map(|a| generator.iter().map(move |b| (*a, *b)))
                .collect(),
        ),
        SizeSpec::PrefRelation(prefers) => {
            SizeSpec::PrefRelation(product_relation(prefers, prefers, carrier, carrier))
        }
    }
}

/// The soft variant of the derived-obligation check: each universal criterion
/// may fail on a small exception set.
///
/// Closure is quantified over covering pairs only — `(a, b)` with `a ≼ b`,
/// `b ∈ X`, `a ∉ X` and nothing strictly between them in `U′` — counted
/// against the carrier `U′ × U′`. A covering violation exists exactly when
/// some violation does, so a zero budget reproduces the hard verdict.
pub fn check_soft_obligation(
    x: &ModelSet,
    sys: &ObligationSystem,
    quality: &QualityRelation,
    size: &SizeSpec<Model>,
    options: &CheckOptions,
) -> Result<SoftVerdict, ObligationError> {
    sys.check_candidate(x)?;
    size.validate()?;
    let ambient = &sys.restriction;
    let fam = sys.family();
    let best = best_elements(ambient, quality)?;

    let best_carrier: BTreeSet<Model> = best.iter().collect();
    let (ideal_ok, ideal_exceptions) = size.soft_forall(&best_carrier, |b| x.contains(b));

    let u_carrier: BTreeSet<Model> = ambient.iter().collect();
    let pairs = pair_spec(size, &u_carrier);
    let pair_carrier: BTreeSet<(Model, Model)> =
        u_carrier.iter().flat_map(|a| u_carrier.iter().map(move |b| (*a, *b))).collect();
    let is_covering_violation = |(a, b): &(Model, Model)| {
        x.contains(b)
            && !x.contains(a)
            && quality.at_least_as_good(a, b)
            && !ambient
                .iter()
                .any(|c| quality.strictly_better(a, &c) && quality.strictly_better(&c, b))
    };
    let (closed_ok, closure_exceptions) =
        pairs.soft_forall(&pair_carrier, |p| !is_covering_violation(p));

    // Tolerated missing ideal cases are also dropped from the targets here.
    let ideals = best.intersection(x);
    let mut nbhd_carrier: BTreeSet<(Model, Model)> = BTreeSet::new();
    for member in x.iter() {
        let not_worse = ModelSet::from_models(
            x.width(),
            ideals.iter().filter(|i| quality.at_least_as_good(i, &member)),
        )
        .expect("ideals share the width");
        for ideal in closest(&member, &not_worse, options.variant, &fam).iter() {
            nbhd_carrier.insert((member, ideal));
        }
    }
    let (nbhd_ok, neighbourhood_exceptions) = pairs.soft_forall(&nbhd_carrier, |(member, ideal)| {
        interval(ideal, member, ambient, options.variant, &fam).is_subset(x)
    });

    let (cp_ok, cp_x_exc, cp_y_exc) = softly_locally_better(
        x,
        &ambient.difference(x),
        quality,
        options.variant,
        &fam,
        size,
    )?;

    Ok(SoftVerdict {
        ideal_ok,
        ideal_exceptions: ModelSet::from_models(x.width(), ideal_exceptions)
            .expect("exceptions come from the best elements"),
        downward_closed: closed_ok,
        closure_exceptions: closure_exceptions.into_iter().collect(),
        improving_neighbourhood: nbhd_ok,
        neighbourhood_exceptions: neighbourhood_exceptions.into_iter().collect(),
        ceteris_paribus: cp_ok,
        cp_exceptions: cp_x_exc.union(&cp_y_exc),
        nontrivial: !x.is_empty() && x != ambient,
        require_cp: options.require_cp,
        require_nontrivial: options.require_nontrivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{models_of, parse_formula};

    fn m(s: &str) -> Model {
        Model::from_bitstring(s).unwrap()
    }

    /// Atomic obligations over the named variables, restricted to `universe`.
    fn atomic_system(names: &[&str], universe: Option<&[&str]>) -> ObligationSystem {
        let vocab = Vocabulary::new(names.to_vec()).unwrap();
        let u = vocab.universe();
        let obligations: Vec<(String, ModelSet)> = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let set = ModelSet::from_models(names.len(), u.iter().filter(|x| x.value(i)))
                    .unwrap();
                (name.to_string(), set)
            })
            .collect();
        let restriction = match universe {
            Some(strings) => ModelSet::from_bitstrings(names.len(), strings.iter().copied()).unwrap(),
            None => u,
        };
        ObligationSystem::new(vocab, restriction, obligations).unwrap()
    }

    fn dependent_2() -> ObligationSystem {
        atomic_system(&["p", "q", "r", "s"], Some(&["1000", "0100", "1111"]))
    }

    #[test]
    fn delta_satisfaction() {
        let sys = dependent_2();
        let delta = DeltaAssignment::new([(2, false), (3, false)]);
        assert!(satisfies_delta(&m("1000"), &delta, sys.obligation_sets()));
        assert!(!satisfies_delta(&m("1111"), &delta, sys.obligation_sets()));
        let empty = DeltaAssignment::default();
        assert!(satisfies_delta(&m("1111"), &empty, sys.obligation_sets()));
    }

    #[test]
    fn independence_over_the_working_universe() {
        let full = atomic_system(&["p", "q"], None);
        assert_eq!(is_independent(&full).unwrap(), None);

        let partial = atomic_system(&["p", "q"], Some(&["10", "01"]));
        let witness = is_independent(&partial).unwrap().unwrap();
        assert_eq!(witness, DeltaAssignment::new([(0, true), (1, true)]));

        let vocab = Vocabulary::new(["p"]).unwrap();
        let no_obligations =
            ObligationSystem::new(vocab.clone(), vocab.universe(), Vec::new()).unwrap();
        assert_eq!(is_independent(&no_obligations).unwrap(), None);
    }

    #[test]
    fn ui_candidate_construction() {
        let sys = atomic_system(&["p", "q"], None);
        let p = models_of(&parse_formula("p", sys.vocab()).unwrap(), &sys.universe());
        assert!(is_ui(&p, &sys).unwrap().holds);

        // 00 has the empty obligation family, whose intersection is U.
        let ross = models_of(&parse_formula("p | ~q", sys.vocab()).unwrap(), &sys.universe());
        let outcome = is_ui(&ross, &sys).unwrap();
        assert!(!outcome.holds);
        assert_eq!(outcome.candidate, sys.universe());

        let d2 = dependent_2();
        let x = ModelSet::from_bitstrings(4, ["1000", "1111"]).unwrap();
        assert!(is_ui(&x, &d2).unwrap().holds);
    }

    #[test]
    fn d_o_membership() {
        let d2 = dependent_2();
        let x = ModelSet::from_bitstrings(4, ["1000", "1111"]).unwrap();
        let witness = in_d_o(&x, &d2).unwrap().unwrap();
        assert_eq!(witness.inside, m("1000"));
        assert_eq!(witness.outside, m("0100"));
        // δ(r) = δ(s) = 0 also witnesses the failure: x and y satisfy it,
        // but no member of X beats y while satisfying it.
        let delta = DeltaAssignment::new([(2, false), (3, false)]);
        let quality = d2.derived_quality(Variant::Set);
        assert!(satisfies_delta(&m("1000"), &delta, d2.obligation_sets()));
        assert!(satisfies_delta(&m("0100"), &delta, d2.obligation_sets()));
        assert!(!x.iter().any(|z| {
            satisfies_delta(&z, &delta, d2.obligation_sets())
                && quality.strictly_better(&z, &m("0100"))
        }));

        let sys = atomic_system(&["p", "q"], None);
        let p = models_of(&parse_formula("p", sys.vocab()).unwrap(), &sys.universe());
        assert_eq!(in_d_o(&p, &sys).unwrap(), None);
    }

    #[test]
    fn classical_consequence() {
        let sys = atomic_system(&["p", "q"], None);
        let u = sys.universe();
        let or = models_of(&parse_formula("p | q", sys.vocab()).unwrap(), &u);
        assert!(is_classical_consequence(&or, &sys).unwrap());
        let not_p = models_of(&parse_formula("~p", sys.vocab()).unwrap(), &u);
        assert!(!is_classical_consequence(&not_p, &sys).unwrap());
    }

    #[test]
    fn hard_check_accepts_a_basic_obligation() {
        let sys = atomic_system(&["p", "q"], None);
        let quality = sys.derived_quality(Variant::Set);
        let p = models_of(&parse_formula("p", sys.vocab()).unwrap(), &sys.universe());
        let verdict =
            check_hard_obligation(&p, &sys, &quality, &CheckOptions::default()).unwrap();
        assert!(verdict.accept(), "{verdict}");
        assert!(verdict.ui);
    }

    #[test]
    fn hard_check_rejects_ross_weakening() {
        let sys = atomic_system(&["p", "q"], None);
        let quality = sys.derived_quality(Variant::Set);
        let ross = models_of(&parse_formula("p | ~q", sys.vocab()).unwrap(), &sys.universe());
        let verdict =
            check_hard_obligation(&ross, &sys, &quality, &CheckOptions::default()).unwrap();
        assert!(!verdict.accept());
        assert_eq!(
            verdict.closure_witness,
            Some(ClosureWitness { better: m("01"), member: m("00") })
        );
    }

    #[test]
    fn hard_check_rejects_the_trivial_candidate() {
        let sys = atomic_system(&["p", "q"], None);
        let quality = sys.derived_quality(Variant::Set);
        let u = sys.universe();
        let verdict = check_hard_obligation(&u, &sys, &quality, &CheckOptions::default()).unwrap();
        assert!(!verdict.accept());
        assert!(!verdict.nontrivial);
        let lax = CheckOptions { require_nontrivial: false, ..CheckOptions::default() };
        assert!(check_hard_obligation(&u, &sys, &quality, &lax).unwrap().accept());
    }

    #[test]
    fn derivation_of_the_independent_two_variable_system() {
        let sys = atomic_system(&["p", "q"], None);
        let quality = sys.derived_quality(Variant::Set);
        let derived =
            derive_obligations(&sys, &quality, &CheckOptions::default(), None).unwrap();
        let sets: Vec<Vec<String>> =
            derived.items.iter().map(|(x, _)| x.bitstrings()).collect();
        // p∧q, q, p, p∨q — cardinality first, then lexicographic.
        assert_eq!(
            sets,
            vec![
                vec!["11"],
                vec!["01", "11"],
                vec!["10", "11"],
                vec!["01", "10", "11"],
            ]
        );
        assert!(!derived.truncated);

        let lax = CheckOptions { require_nontrivial: false, ..CheckOptions::default() };
        let derived = derive_obligations(&sys, &quality, &lax, None).unwrap();
        assert_eq!(derived.items.len(), 5);

        let capped = derive_obligations(&sys, &quality, &lax, Some(2)).unwrap();
        assert_eq!(capped.items.len(), 2);
        assert!(capped.truncated);
    }

    #[test]
    fn derivation_of_a_single_world_universe() {
        let sys = atomic_system(&["p"], Some(&["1"]));
        let quality = sys.derived_quality(Variant::Set);
        let derived =
            derive_obligations(&sys, &quality, &CheckOptions::default(), None).unwrap();
        assert!(derived.items.is_empty());
    }

    fn assassin() -> (ObligationSystem, QualityRelation) {
        let vocab = Vocabulary::new(["k", "o"]).unwrap();
        let u = vocab.universe();
        let not_k = models_of(&parse_formula("~k", &vocab).unwrap(), &u);
        let not_o = models_of(&parse_formula("~o", &vocab).unwrap(), &u);
        let sys = ObligationSystem::new(
            vocab,
            u,
            vec![("no_killing".to_string(), not_k), ("no_cigarettes".to_string(), not_o)],
        )
        .unwrap();
        let layers: Vec<ModelSet> = ["00", "01", "11", "10"]
            .iter()
            .map(|s| ModelSet::from_bitstrings(2, [*s]).unwrap())
            .collect();
        let quality = QualityRelation::explicit_layers(&layers).unwrap();
        (sys, quality)
    }

    #[test]
    fn soft_check_of_the_considerate_assassin() {
        let (sys, quality) = assassin();
        let not_o = ModelSet::from_bitstrings(2, ["00", "10"]).unwrap();

        // Budget ⌊0.1·16⌋ = 1 pair over U′ × U′.
        let verdict = check_soft_obligation(
            &not_o,
            &sys,
            &quality,
            &SizeSpec::Fraction(0.1),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(verdict.accept(), "{verdict}");
        assert_eq!(verdict.closure_exceptions, vec![(m("11"), m("10"))]);
        assert!(verdict.ideal_exceptions.is_empty());
        assert!(verdict.neighbourhood_exceptions.is_empty());

        // A zero budget reproduces the hard rejection.
        let strict = check_soft_obligation(
            &not_o,
            &sys,
            &quality,
            &SizeSpec::Fraction(0.0),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(!strict.accept());
        let hard =
            check_hard_obligation(&not_o, &sys, &quality, &CheckOptions::default()).unwrap();
        assert!(!hard.accept());
    }

    #[test]
    fn soft_ideal_tolerates_a_missing_best_element() {
        // Two equally good best elements, X missing one of them.
        let sys = atomic_system(&["p", "q"], Some(&["10", "01", "00"]));
        let quality = sys.derived_quality(Variant::Set);
        let x = ModelSet::from_bitstrings(2, ["10"]).unwrap();
        let verdict = check_soft_obligation(
            &x,
            &sys,
            &quality,
            &SizeSpec::Fraction(0.5),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(verdict.ideal_ok);
        assert_eq!(verdict.ideal_exceptions.bitstrings(), vec!["01"]);
    }

    #[test]
    fn candidates_must_stay_inside_the_restriction() {
        let sys = atomic_system(&["p", "q"], Some(&["10", "01"]));
        let stray = ModelSet::from_bitstrings(2, ["11"]).unwrap();
        assert!(matches!(
            is_ui(&stray, &sys),
            Err(ObligationError::PreconditionViolation(_))
        ));
    }
}
