//! Hamming distances in the set and counting variants, betweenness,
//! intervals, the closest-element operator, and neighbourhood tests.
//!
//! Distances are measured over an index family: either the propositional
//! variables of the vocabulary, or a family of obligations where coordinate
//! `i` of a model is its membership in obligation `i`.

use thiserror::Error;

use crate::model::{Model, ModelSet};
use crate::quality::{Cmp, QualityRelation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

/// Which flavour of Hamming comparison to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Distances are index sets compared by inclusion; partial.
    Set,
    /// Distances are cardinalities; total.
    Count,
}

/// Coordinate source for distance computation.
#[derive(Debug, Clone, Copy)]
pub enum IndexFamily<'a> {
    /// Coordinate `i` is the truth value of variable `i`.
    Variables(usize),
    /// Coordinate `i` is membership in obligation `i` (the ∈-case).
    Obligations(&'a [ModelSet]),
}

impl IndexFamily<'_> {
    pub fn len(&self) -> usize {
        match self {
            IndexFamily::Variables(n) => *n,
            IndexFamily::Obligations(sets) => sets.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The full coordinate vector of a model, as a bitmask over indices.
    pub fn coordinates(&self, m: &Model) -> IndexSet {
        match self {
            IndexFamily::Variables(n) => IndexSet { mask: m.bits(), len: *n },
            IndexFamily::Obligations(sets) => {
                let mut mask = 0u32;
                for (i, set) in sets.iter().enumerate() {
                    if set.contains(m) {
                        mask |= 1 << i;
                    }
                }
                IndexSet { mask, len: sets.len() }
            }
        }
    }
}

/// A subset of an index family, e.g. a set-variant distance value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexSet {
    mask: u32,
    len: usize,
}

impl IndexSet {
    pub fn empty(len: usize) -> Self {
        IndexSet { mask: 0, len }
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn card(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.mask & (1 << index) != 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|i| self.contains(*i))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_proper_subset(&self, other: &IndexSet) -> bool {
        self.is_subset(other) && self.mask != other.mask
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet { mask: self.mask | other.mask, len: self.len }
    }

    pub fn symmetric_difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet { mask: self.mask ^ other.mask, len: self.len }
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet { mask: self.mask & !other.mask, len: self.len }
    }

    /// Render with names supplied per index, e.g. obligation names.
    pub fn display_with(&self, names: &[String]) -> String {
        let items: Vec<&str> = self.indices().map(|i| names[i].as_str()).collect();
        format!("{{{}}}", items.join(", "))
    }
}

/// The obligation profile of a model: the indices of obligations containing it.
pub fn profile(x: &Model, obligations: &[ModelSet]) -> IndexSet {
    IndexFamily::Obligations(obligations).coordinates(x)
}

/// Set-variant Hamming distance: the set of indices where `x` and `y` differ.
pub fn dist_set(x: &Model, y: &Model, fam: &IndexFamily) -> IndexSet {
    fam.coordinates(x).symmetric_difference(&fam.coordinates(y))
}

/// Counting-variant Hamming distance: the cardinality of `dist_set`.
pub fn dist_count(x: &Model, y: &Model, fam: &IndexFamily) -> u32 {
    dist_set(x, y, fam).card()
}

/// Additive betweenness: the distance from `x` to `z` decomposes through `y`.
pub fn between(x: &Model, y: &Model, z: &Model, variant: Variant, fam: &IndexFamily) -> bool {
    let xy = dist_set(x, y, fam);
    let yz = dist_set(y, z, fam);
    let xz = dist_set(x, z, fam);
    match variant {
        Variant::Set => xy.union(&yz) == xz,
        Variant::Count => xy.card() + yz.card() == xz.card(),
    }
}

/// `[x, z]` within `ambient`: the members lying between the endpoints.
pub fn interval(
    x: &Model,
    z: &Model,
    ambient: &ModelSet,
    variant: Variant,
    fam: &IndexFamily,
) -> ModelSet {
    ModelSet::from_models(
        ambient.width(),
        ambient.iter().filter(|y| between(x, y, z, variant, fam)),
    )
    .expect("filtering preserves the width")
}

fn strictly_closer(a: &IndexSet, b: &IndexSet, variant: Variant) -> bool {
    match variant {
        Variant::Set => a.is_proper_subset(b),
        Variant::Count => a.card() < b.card(),
    }
}

/// `x ∥ X`: the members of `X` at minimal distance from `x`.
///
/// Minimal means no member sits at a strictly smaller comparable distance;
/// ties are all kept, so the result is empty only for empty `X`.
pub fn closest(x: &Model, set: &ModelSet, variant: Variant, fam: &IndexFamily) -> ModelSet {
    let distances: Vec<(Model, IndexSet)> =
        set.iter().map(|m| (m, dist_set(x, &m, fam))).collect();
    ModelSet::from_models(
        set.width(),
        distances.iter().filter_map(|(m, d)| {
            let dominated = distances.iter().any(|(_, d2)| strictly_closer(d2, d, variant));
            (!dominated).then_some(*m)
        }),
    )
    .expect("members come from the input set")
}

fn check_nested(inner: &ModelSet, outer: &ModelSet, ambient: &ModelSet) -> Result<(), MetricError> {
    if !inner.is_subset(outer) {
        return Err(MetricError::PreconditionViolation(format!(
            "{inner} is not a subset of {outer}"
        )));
    }
    if !outer.is_subset(ambient) {
        return Err(MetricError::PreconditionViolation(format!(
            "{outer} is not a subset of the ambient set {ambient}"
        )));
    }
    Ok(())
}

/// Whether `y_set` is a neighbourhood of `x_set` in `ambient`: every geodesic
/// from a member to one of its closest `x_set` points stays inside.
pub fn is_neighbourhood(
    y_set: &ModelSet,
    x_set: &ModelSet,
    ambient: &ModelSet,
    variant: Variant,
    fam: &IndexFamily,
) -> Result<bool, MetricError> {
    check_nested(x_set, y_set, ambient)?;
    for y in y_set.iter() {
        for x in closest(&y, x_set, variant, fam).iter() {
            if !interval(&x, &y, ambient, variant, fam).is_subset(y_set) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Improving variant: for each member `y` only the closest among the
/// `x_set` points at least as good as `y` are considered; members with no
/// such point impose nothing.
pub fn is_improving_neighbourhood(
    y_set: &ModelSet,
    x_set: &ModelSet,
    ambient: &ModelSet,
    variant: Variant,
    fam: &IndexFamily,
    quality: &QualityRelation,
) -> Result<bool, MetricError> {
    check_nested(x_set, y_set, ambient)?;
    for y in y_set.iter() {
        let not_worse = ModelSet::from_models(
            x_set.width(),
            x_set
                .iter()
                .filter(|x| matches!(quality.compare(x, &y), Cmp::Better | Cmp::Equiv)),
        )
        .expect("members come from the input set");
        for x in closest(&y, &not_worse, variant, fam).iter() {
            if !interval(&x, &y, ambient, variant, fam).is_subset(y_set) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSet, Vocabulary};

    fn m(s: &str) -> Model {
        Model::from_bitstring(s).unwrap()
    }

    fn atomic_obligations(n: usize) -> Vec<ModelSet> {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let vocab = Vocabulary::new(names).unwrap();
        let u = vocab.universe();
        (0..n)
            .map(|i| {
                ModelSet::from_models(n, u.iter().filter(|x| x.value(i))).unwrap()
            })
            .collect()
    }

    #[test]
    fn profile_over_atomic_obligations() {
        let obls = atomic_obligations(3);
        let p = profile(&m("001"), &obls);
        assert_eq!(p.indices().collect::<Vec<_>>(), vec![2]);
        let p = profile(&m("110"), &obls);
        assert_eq!(p.indices().collect::<Vec<_>>(), vec![0, 1]);
        assert!(profile(&m("110"), &[]).is_empty());
    }

    #[test]
    fn dist_set_matches_dependent_2() {
        let obls = atomic_obligations(4);
        let fam = IndexFamily::Obligations(&obls);
        let d = dist_set(&m("1000"), &m("0100"), &fam);
        assert_eq!(d.indices().collect::<Vec<_>>(), vec![0, 1]);
        let d = dist_set(&m("1111"), &m("0100"), &fam);
        assert_eq!(d.indices().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert!(dist_set(&m("1000"), &m("1000"), &fam).is_empty());
    }

    #[test]
    fn counting_distances_of_example_count() {
        let obls = atomic_obligations(3);
        let fam = IndexFamily::Obligations(&obls);
        let (x, y, z) = (m("001"), m("110"), m("000"));
        assert_eq!(dist_count(&x, &y, &fam), 3);
        assert_eq!(dist_count(&x, &z, &fam), 1);
        assert_eq!(dist_count(&z, &y, &fam), 2);
        // x is not between y and z in the counting variant.
        assert!(!between(&y, &x, &z, Variant::Count, &fam));
        assert!(between(&x, &x, &z, Variant::Count, &fam));
        assert!(between(&x, &x, &z, Variant::Set, &fam));
    }

    #[test]
    fn interval_of_h_n_local() {
        let obls = atomic_obligations(4);
        let fam = IndexFamily::Obligations(&obls);
        let u = ModelSet::from_bitstrings(4, ["0000", "0001", "0010", "1110"]).unwrap();
        let iv = interval(&m("0000"), &m("1110"), &u, Variant::Count, &fam);
        assert_eq!(iv.bitstrings(), vec!["0000", "0010", "1110"]);
    }

    #[test]
    fn closest_keeps_incomparable_ties() {
        let obls = atomic_obligations(4);
        let fam = IndexFamily::Obligations(&obls);
        let x_set = ModelSet::from_bitstrings(4, ["1000", "1111"]).unwrap();
        let c = closest(&m("0100"), &x_set, Variant::Set, &fam);
        assert_eq!(c.bitstrings(), vec!["1000", "1111"]);

        let x_set = ModelSet::from_bitstrings(4, ["0010", "1111"]).unwrap();
        let c = closest(&m("1110"), &x_set, Variant::Count, &fam);
        assert_eq!(c.bitstrings(), vec!["1111"]);

        let singleton = ModelSet::from_bitstrings(4, ["1000"]).unwrap();
        assert_eq!(closest(&m("1000"), &singleton, Variant::Set, &fam), singleton);
        assert!(closest(&m("1000"), &ModelSet::empty(4), Variant::Set, &fam).is_empty());
    }

    #[test]
    fn neighbourhood_preconditions() {
        let obls = atomic_obligations(2);
        let fam = IndexFamily::Obligations(&obls);
        let u = Vocabulary::new(["p", "q"]).unwrap().universe();
        let x = ModelSet::from_bitstrings(2, ["11"]).unwrap();
        let y = ModelSet::from_bitstrings(2, ["10"]).unwrap();
        assert!(is_neighbourhood(&y, &x, &u, Variant::Set, &fam).is_err());
    }
}
