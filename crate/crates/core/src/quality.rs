//! Quality preorders on models and the local betterness relations between
//! model sets.
//!
//! Following the preferential tradition, smaller means better: a model
//! satisfying more obligations compares as `Better`. The set-variant order
//! compares obligation profiles by inclusion and is partial; the counting
//! variant and explicit rankings are total preorders.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::metric::{closest, IndexFamily, Variant};
use crate::model::{Model, ModelSet};
use crate::size::SizeSpec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QualityError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("best elements are undefined for an empty universe")]
    EmptyUniverse,
    #[error("invalid explicit ranking: {0}")]
    BadExplicitRanking(String),
}

/// Outcome of comparing two models; `Better` means the left one is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Better,
    Equiv,
    Worse,
    Incomparable,
}

impl Cmp {
    pub fn flip(self) -> Cmp {
        match self {
            Cmp::Better => Cmp::Worse,
            Cmp::Worse => Cmp::Better,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QualityRelation {
    /// `x` better than `y` iff `x` satisfies a strict superset of obligations.
    DerivedSet(Vec<ModelSet>),
    /// `x` better than `y` iff `x` satisfies strictly more obligations.
    DerivedCount(Vec<ModelSet>),
    /// Total preorder given as strictly ordered layers, best layer first.
    /// Models outside every layer are incomparable to everything else.
    ExplicitLayers(BTreeMap<Model, usize>),
    /// Strict partial order given extensionally: `(a, b)` means `a` is better.
    ExplicitPairs(BTreeSet<(Model, Model)>),
}

impl QualityRelation {
    pub fn derived_set(obligations: &[ModelSet]) -> Self {
        QualityRelation::DerivedSet(obligations.to_vec())
    }

    pub fn derived_count(obligations: &[ModelSet]) -> Self {
        QualityRelation::DerivedCount(obligations.to_vec())
    }

    pub fn explicit_layers(layers: &[ModelSet]) -> Result<Self, QualityError> {
        let mut rank = BTreeMap::new();
        for (i, layer) in layers.iter().enumerate() {
            for m in layer.iter() {
                if rank.insert(m, i).is_some() {
                    return Err(QualityError::BadExplicitRanking(format!(
                        "model {m} appears in more than one layer"
                    )));
                }
            }
        }
        Ok(QualityRelation::ExplicitLayers(rank))
    }

    /// Strict pairs must come transitively closed and acyclic.
    pub fn explicit_pairs(better: BTreeSet<(Model, Model)>) -> Result<Self, QualityError> {
        for (a, b) in &better {
            if a == b {
                return Err(QualityError::BadExplicitRanking(format!("{a} precedes itself")));
            }
            if better.contains(&(*b, *a)) {
                return Err(QualityError::BadExplicitRanking(format!(
                    "cycle between {a} and {b}"
                )));
            }
            for (c, d) in &better {
                if c == b && !better.contains(&(*a, *d)) {
                    return Err(QualityError::BadExplicitRanking(format!(
                        "missing transitive pair ({a}, {d})"
                    )));
                }
            }
        }
        Ok(QualityRelation::ExplicitPairs(better))
    }

    /// Compare `x` against `y`.
    pub fn compare(&self, x: &Model, y: &Model) -> Cmp {
        match self {
            QualityRelation::DerivedSet(obls) => {
                let px = crate::metric::profile(x, obls);
                let py = crate::metric::profile(y, obls);
                if px == py {
                    Cmp::Equiv
                } else if py.is_proper_subset(&px) {
                    Cmp::Better
                } else if px.is_proper_subset(&py) {
                    Cmp::Worse
                } else {
                    Cmp::Incomparable
                }
            }
            QualityRelation::DerivedCount(obls) => {
                let cx = crate::metric::profile(x, obls).card();
                let cy = crate::metric::profile(y, obls).card();
                match cx.cmp(&cy) {
                    std::cmp::Ordering::Greater => Cmp::Better,
                    std::cmp::Ordering::Equal => Cmp::Equiv,
                    std::cmp::Ordering::Less => Cmp::Worse,
                }
            }
            QualityRelation::ExplicitLayers(rank) => match (rank.get(x), rank.get(y)) {
                (Some(rx), Some(ry)) => match rx.cmp(ry) {
                    std::cmp::Ordering::Less => Cmp::Better,
                    std::cmp::Ordering::Equal => Cmp::Equiv,
                    std::cmp::Ordering::Greater => Cmp::Worse,
                },
                _ => {
                    if x == y {
                        Cmp::Equiv
                    } else {
                        Cmp::Incomparable
                    }
                }
            },
            QualityRelation::ExplicitPairs(better) => {
                if x == y {
                    Cmp::Equiv
                } else if better.contains(&(*x, *y)) {
                    Cmp::Better
                } else if better.contains(&(*y, *x)) {
                    Cmp::Worse
                } else {
                    Cmp::Incomparable
                }
            }
        }
    }

    pub fn strictly_better(&self, x: &Model, y: &Model) -> bool {
        self.compare(x, y) == Cmp::Better
    }

    /// `x ≼ y`: better or equivalent.
    pub fn at_least_as_good(&self, x: &Model, y: &Model) -> bool {
        matches!(self.compare(x, y), Cmp::Better | Cmp::Equiv)
    }
}

/// The ≺-minimal members of `ambient`: those with no strictly better member.
pub fn best_elements(ambient: &ModelSet, quality: &QualityRelation) -> Result<ModelSet, QualityError> {
    if ambient.is_empty() {
        return Err(QualityError::EmptyUniverse);
    }
    Ok(ModelSet::from_models(
        ambient.width(),
        ambient
            .iter()
            .filter(|x| !ambient.iter().any(|y| quality.strictly_better(&y, x))),
    )
    .expect("members come from the ambient set"))
}

/// Witness to a closure failure: `better ≼ member`, `member ∈ X`, `better ∉ X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureWitness {
    pub better: Model,
    pub member: Model,
}

impl fmt::Display for ClosureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \u{227c} {} escapes the set", self.better, self.member)
    }
}

/// Downward closure of `set` within `ambient`; `None` means closed.
pub fn is_downward_closed(
    set: &ModelSet,
    ambient: &ModelSet,
    quality: &QualityRelation,
) -> Result<Option<ClosureWitness>, QualityError> {
    if !set.is_subset(ambient) {
        return Err(QualityError::PreconditionViolation(format!(
            "{set} is not a subset of the ambient set {ambient}"
        )));
    }
    for member in set.iter() {
        for better in ambient.iter() {
            if !set.contains(&better) && quality.at_least_as_good(&better, &member) {
                return Ok(Some(ClosureWitness { better, member }));
            }
        }
    }
    Ok(None)
}

/// `x ≺ Y`: every ∥-closest member of `Y` is strictly worse than `x`.
/// Vacuously true for empty `Y`.
pub fn better_than_set(
    x: &Model,
    y_set: &ModelSet,
    quality: &QualityRelation,
    variant: Variant,
    fam: &IndexFamily,
) -> bool {
    closest(x, y_set, variant, fam)
        .iter()
        .all(|y| quality.strictly_better(x, &y))
}

/// `X ≺ y`: every ∥-closest member of `X` seen from `y` is strictly better.
pub fn set_better_than(
    x_set: &ModelSet,
    y: &Model,
    quality: &QualityRelation,
    variant: Variant,
    fam: &IndexFamily,
) -> bool {
    closest(y, x_set, variant, fam)
        .iter()
        .all(|x| quality.strictly_better(&x, y))
}

/// Which half of the local-betterness conjunction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalSide {
    /// Some `x ∈ X` is not better than its closest `Y` members.
    FromX,
    /// Some `y ∈ Y` is not dominated by its closest `X` members.
    FromY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalWitness {
    pub side: LocalSide,
    /// The quantified element that fails its condition.
    pub element: Model,
    /// A closest counterpart that is not strictly worse (resp. better).
    pub blocking: Model,
}

impl fmt::Display for LocalWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            LocalSide::FromX => write!(
                f,
                "{} is not better than its closest outside point {}",
                self.element, self.blocking
            ),
            LocalSide::FromY => write!(
                f,
                "{} is not dominated by its closest inside point {}",
                self.element, self.blocking
            ),
        }
    }
}

/// `X ≺_l Y`: every member of `X` beats its closest `Y` points and every
/// member of `Y` is beaten by its closest `X` points. `None` means it holds.
pub fn locally_better(
    x_set: &ModelSet,
    y_set: &ModelSet,
    quality: &QualityRelation,
    variant: Variant,
    fam: &IndexFamily,
) -> Option<LocalWitness> {
    for x in x_set.iter() {
        for y in closest(&x, y_set, variant, fam).iter() {
            if !quality.strictly_better(&x, &y) {
                return Some(LocalWitness { side: LocalSide::FromX, element: x, blocking: y });
            }
        }
    }
    for y in y_set.iter() {
        for x in closest(&y, x_set, variant, fam).iter() {
            if !quality.strictly_better(&x, &y) {
                return Some(LocalWitness { side: LocalSide::FromY, element: y, blocking: x });
            }
        }
    }
    None
}

/// `X ≪_l Y`: the two local conditions hold up to a small exception set on
/// each side. Returns the verdict and both exception sets.
pub fn softly_locally_better(
    x_set: &ModelSet,
    y_set: &ModelSet,
    quality: &QualityRelation,
    variant: Variant,
    fam: &IndexFamily,
    size: &SizeSpec<Model>,
) -> Result<(bool, ModelSet, ModelSet), crate::size::SizeError> {
    size.validate()?;
    let x_carrier: BTreeSet<Model> = x_set.iter().collect();
    let (x_ok, x_exceptions) =
        size.soft_forall(&x_carrier, |x| better_than_set(x, y_set, quality, variant, fam));
    let y_carrier: BTreeSet<Model> = y_set.iter().collect();
    let (y_ok, y_exceptions) =
        size.soft_forall(&y_carrier, |y| set_better_than(x_set, y, quality, variant, fam));
    let to_set = |models: BTreeSet<Model>| {
        ModelSet::from_models(x_set.width(), models).expect("exceptions come from the carriers")
    };
    Ok((x_ok && y_ok, to_set(x_exceptions), to_set(y_exceptions)))
}

/// Ceteris paribus improvement: `X ≺_l (ambient − X)`.
pub fn ceteris_paribus_improving(
    set: &ModelSet,
    ambient: &ModelSet,
    quality: &QualityRelation,
    variant: Variant,
    fam: &IndexFamily,
) -> Result<Option<LocalWitness>, QualityError> {
    if !set.is_subset(ambient) {
        return Err(QualityError::PreconditionViolation(format!(
            "{set} is not a subset of the ambient set {ambient}"
        )));
    }
    Ok(locally_better(set, &ambient.difference(set), quality, variant, fam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vocabulary;

    fn m(s: &str) -> Model {
        Model::from_bitstring(s).unwrap()
    }

    fn atomic(n: usize) -> Vec<ModelSet> {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let u = Vocabulary::new(names).unwrap().universe();
        (0..n)
            .map(|i| ModelSet::from_models(n, u.iter().filter(|x| x.value(i))).unwrap())
            .collect()
    }

    #[test]
    fn derived_set_comparisons() {
        let q = QualityRelation::derived_set(&atomic(3));
        // 001 satisfies {r} which strictly contains the empty profile of 000.
        assert_eq!(q.compare(&m("001"), &m("000")), Cmp::Better);
        let q4 = QualityRelation::derived_set(&atomic(4));
        assert_eq!(q4.compare(&m("1000"), &m("0100")), Cmp::Incomparable);
        assert_eq!(q4.compare(&m("1000"), &m("1000")), Cmp::Equiv);
    }

    #[test]
    fn explicit_assassin_ranking() {
        // Variables (k, o); layers best-first.
        let layers = [
            ModelSet::from_bitstrings(2, ["00"]).unwrap(),
            ModelSet::from_bitstrings(2, ["01"]).unwrap(),
            ModelSet::from_bitstrings(2, ["11"]).unwrap(),
            ModelSet::from_bitstrings(2, ["10"]).unwrap(),
        ];
        let q = QualityRelation::explicit_layers(&layers).unwrap();
        assert_eq!(q.compare(&m("11"), &m("10")), Cmp::Better);
        assert_eq!(q.compare(&m("10"), &m("00")), Cmp::Worse);
    }

    #[test]
    fn explicit_pairs_validation() {
        let a = m("0");
        let b = m("1");
        let ok = BTreeSet::from([(a, b)]);
        assert!(QualityRelation::explicit_pairs(ok).is_ok());
        let cyclic = BTreeSet::from([(a, b), (b, a)]);
        assert!(QualityRelation::explicit_pairs(cyclic).is_err());
        let c = m("0");
        let _ = c;
        let not_closed = BTreeSet::from([(m("00"), m("01")), (m("01"), m("10"))]);
        assert!(QualityRelation::explicit_pairs(not_closed).is_err());
    }

    #[test]
    fn best_elements_of_dependent_examples() {
        let q = QualityRelation::derived_set(&atomic(4));
        let u = ModelSet::from_bitstrings(4, ["1000", "0100", "1111"]).unwrap();
        assert_eq!(best_elements(&u, &q).unwrap().bitstrings(), vec!["1111"]);

        let q2 = QualityRelation::derived_set(&atomic(2));
        let u2 = ModelSet::from_bitstrings(2, ["10", "01"]).unwrap();
        assert_eq!(best_elements(&u2, &q2).unwrap(), u2);

        let full = Vocabulary::new(["p", "q"]).unwrap().universe();
        assert_eq!(best_elements(&full, &q2).unwrap().bitstrings(), vec!["11"]);

        assert_eq!(best_elements(&ModelSet::empty(2), &q2), Err(QualityError::EmptyUniverse));
    }

    #[test]
    fn closure_of_ross_weakening_fails_with_witness() {
        let q = QualityRelation::derived_set(&atomic(2));
        let u = Vocabulary::new(["p", "q"]).unwrap().universe();
        let ross = ModelSet::from_bitstrings(2, ["00", "10", "11"]).unwrap();
        let witness = is_downward_closed(&ross, &u, &q).unwrap().unwrap();
        assert_eq!(witness, ClosureWitness { better: m("01"), member: m("00") });

        let u2 = ModelSet::from_bitstrings(2, ["10", "01"]).unwrap();
        let x = ModelSet::from_bitstrings(2, ["10"]).unwrap();
        assert_eq!(is_downward_closed(&x, &u2, &q).unwrap(), None);
        assert_eq!(is_downward_closed(&u2, &u2, &q).unwrap(), None);
    }

    #[test]
    fn local_betterness_in_example_not_global() {
        let obls = atomic(4);
        let fam = IndexFamily::Obligations(&obls);
        let u = ModelSet::from_bitstrings(4, ["0000", "0010", "1110", "1111"]).unwrap();
        let x = ModelSet::from_bitstrings(4, ["0010", "1111"]).unwrap();
        let cx = u.difference(&x);

        let qc = QualityRelation::derived_count(&obls);
        assert_eq!(locally_better(&x, &cx, &qc, Variant::Count, &fam), None);

        let qs = QualityRelation::derived_set(&obls);
        assert!(locally_better(&x, &cx, &qs, Variant::Set, &fam).is_some());
    }

    #[test]
    fn better_than_empty_set_is_vacuous() {
        let obls = atomic(2);
        let fam = IndexFamily::Obligations(&obls);
        let q = QualityRelation::derived_set(&obls);
        assert!(better_than_set(&m("00"), &ModelSet::empty(2), &q, Variant::Set, &fam));
    }
}
