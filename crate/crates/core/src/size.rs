//! Notions of big and small subsets: principal filters from preferential
//! generators, exception-fraction budgets, the product construction, and the
//! soft universal quantifier.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SizeError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("the product construction requires principal filters on both sides")]
    NonPrincipal,
    #[error("exception fraction {0} is outside [0, 1)")]
    BadFraction(f64),
}

/// A notion of "big subset" per carrier set.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeSpec<T: Ord + Clone> {
    /// `A` is big in `X` iff `|X − A| ≤ ⌊ε·|X|⌋`. An ideal, not a filter.
    Fraction(f64),
    /// Principal filter with the generator given extensionally:
    /// `μ(X) = ideal ∩ X`, and `A` is big iff `μ(X) ⊆ A`.
    Ideal(BTreeSet<T>),
    /// Principal filter generated by the minimal elements of a preferential
    /// relation; `(a, b)` means `a` is strictly preferred to `b`.
    PrefRelation(BTreeSet<(T, T)>),
}

impl<T: Ord + Clone> SizeSpec<T> {
    pub fn is_principal(&self) -> bool {
        !matches!(self, SizeSpec::Fraction(_))
    }

    pub fn validate(&self) -> Result<(), SizeError> {
        match self {
            SizeSpec::Fraction(eps) if !(0.0..1.0).contains(eps) => {
                Err(SizeError::BadFraction(*eps))
            }
            _ => Ok(()),
        }
    }

    /// The generator `μ(X)` of the principal filter on `X`.
    pub fn mu(&self, carrier: &BTreeSet<T>) -> Result<BTreeSet<T>, SizeError> {
        match self {
            SizeSpec::Fraction(_) => Err(SizeError::NonPrincipal),
            SizeSpec::Ideal(generator) => {
                Ok(carrier.iter().filter(|x| generator.contains(x)).cloned().collect())
            }
            SizeSpec::PrefRelation(prefers) => Ok(carrier
                .iter()
                .filter(|x| {
                    !carrier
                        .iter()
                        .any(|y| y != *x && prefers.contains(&(y.clone(), (*x).clone())))
                })
                .cloned()
                .collect()),
        }
    }

    /// Whether `subset` is big in `carrier`.
    pub fn is_big(&self, subset: &BTreeSet<T>, carrier: &BTreeSet<T>) -> Result<bool, SizeError> {
        self.validate()?;
        if !subset.is_subset(carrier) {
            return Err(SizeError::PreconditionViolation(
                "the candidate big set must be a subset of its carrier".to_string(),
            ));
        }
        match self {
            SizeSpec::Fraction(eps) => {
                let budget = (eps * carrier.len() as f64).floor() as usize;
                Ok(carrier.len() - subset.len() <= budget)
            }
            _ => Ok(self.mu(carrier)?.is_subset(subset)),
        }
    }

    /// The soft quantifier ∇: `pred` holds on a big subset of `carrier`.
    /// The exception set is returned either way.
    pub fn soft_forall<F>(&self, carrier: &BTreeSet<T>, pred: F) -> (bool, BTreeSet<T>)
    where
        F: Fn(&T) -> bool,
    {
        let exceptions: BTreeSet<T> = carrier.iter().filter(|x| !pred(x)).cloned().collect();
        let ok = match self {
            SizeSpec::Fraction(eps) => {
                let budget = (eps * carrier.len() as f64).floor() as usize;
                exceptions.len() <= budget
            }
            _ => {
                let mu = self.mu(carrier).expect("principal kinds always have a generator");
                mu.iter().all(|x| !exceptions.contains(x))
            }
        };
        (ok, exceptions)
    }
}

/// Whether `subset` is big in `X × X'` under the product filter generated by
/// `μ(X) × μ(X')`. Both sides must be principal.
pub fn product_is_big<T, U>(
    subset: &BTreeSet<(T, U)>,
    carrier: &BTreeSet<T>,
    carrier2: &BTreeSet<U>,
    size: &SizeSpec<T>,
    size2: &SizeSpec<U>,
) -> Result<bool, SizeError>
where
    T: Ord + Clone,
    U: Ord + Clone,
{
    if !size.is_principal() || !size2.is_principal() {
        return Err(SizeError::NonPrincipal);
    }
    for (a, b) in subset {
        if !carrier.contains(a) || !carrier2.contains(b) {
            return Err(SizeError::PreconditionViolation(
                "the candidate big set must be a subset of the product carrier".to_string(),
            ));
        }
    }
    let mu = size.mu(carrier)?;
    let mu2 = size2.mu(carrier2)?;
    Ok(mu
        .iter()
        .all(|a| mu2.iter().all(|b| subset.contains(&(a.clone(), b.clone())))))
}

/// The preferential relation on `X × X'` induced componentwise by two strict
/// relations: a pair strictly precedes another when it is weakly preferred in
/// both coordinates and differs.
pub fn product_relation<T, U>(
    prefers: &BTreeSet<(T, T)>,
    prefers2: &BTreeSet<(U, U)>,
    carrier: &BTreeSet<T>,
    carrier2: &BTreeSet<U>,
) -> BTreeSet<((T, U), (T, U))>
where
    T: Ord + Clone,
    U: Ord + Clone,
{
    let weakly = |a: &T, b: &T| a == b || prefers.contains(&(a.clone(), b.clone()));
    let weakly2 = |a: &U, b: &U| a == b || prefers2.contains(&(a.clone(), b.clone()));
    let mut out = BTreeSet::new();
    for a in carrier {
        for a2 in carrier2 {
            for b in carrier {
                for b2 in carrier2 {
                    if (a, a2) != (b, b2) && weakly(a, b) && weakly2(a2, b2) {
                        out.insert(((a.clone(), a2.clone()), (b.clone(), b2.clone())));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set<T: Ord + Clone>(items: impl IntoIterator<Item = T>) -> BTreeSet<T> {
        items.into_iter().collect()
    }

    #[test]
    fn whole_carrier_is_big_for_any_spec() {
        let x = set([1, 2, 3]);
        for spec in [
            SizeSpec::Fraction(0.0),
            SizeSpec::Ideal(set([2])),
            SizeSpec::PrefRelation(set([(1, 2)])),
        ] {
            assert_eq!(spec.is_big(&x, &x), Ok(true));
        }
    }

    #[test]
    fn principal_generator_decides_membership() {
        let x = set([1, 2, 3]);
        let spec = SizeSpec::Ideal(set([2]));
        assert_eq!(spec.is_big(&set([2]), &x), Ok(true));
        assert_eq!(spec.is_big(&set([]), &x), Ok(false));
    }

    #[test]
    fn fraction_budget_is_floor_of_epsilon_times_carrier() {
        let x: BTreeSet<u32> = (0..8).collect();
        let spec = SizeSpec::Fraction(0.25);
        let six: BTreeSet<u32> = (0..6).collect();
        assert_eq!(spec.is_big(&six, &x), Ok(true));
        let five: BTreeSet<u32> = (0..5).collect();
        assert_eq!(spec.is_big(&five, &x), Ok(false));
    }

    #[test]
    fn product_requires_principal_sides() {
        let x = set([1, 2]);
        let y = set([10]);
        let c: BTreeSet<(i32, i32)> = x.iter().flat_map(|a| y.iter().map(|b| (*a, *b))).collect();
        assert_eq!(
            product_is_big(&c, &x, &y, &SizeSpec::Fraction(0.1), &SizeSpec::Ideal(set([10]))),
            Err(SizeError::NonPrincipal)
        );
        // Exactly the generator rectangle is big; dropping a pair is not.
        let sx = SizeSpec::Ideal(set([1]));
        let sy = SizeSpec::Ideal(set([10]));
        assert_eq!(product_is_big(&set([(1, 10)]), &x, &y, &sx, &sy), Ok(true));
        assert_eq!(product_is_big(&set([(2, 10)]), &x, &y, &sx, &sy), Ok(false));
        assert_eq!(product_is_big(&c, &x, &y, &sx, &sy), Ok(true));
    }

    #[test]
    fn soft_forall_reports_exceptions() {
        let x: BTreeSet<u32> = (0..4).collect();
        let spec = SizeSpec::Fraction(0.3);
        let (ok, exc) = spec.soft_forall(&x, |v| *v != 3);
        assert!(ok, "one exception fits the budget of floor(0.3*4) = 1");
        assert_eq!(exc, set([3]));

        let strict = SizeSpec::Fraction(0.0);
        let (ok, exc) = strict.soft_forall(&x, |v| *v != 3);
        assert!(!ok);
        assert_eq!(exc, set([3]));

        let (ok, exc) = strict.soft_forall(&x, |_| true);
        assert!(ok);
        assert!(exc.is_empty());
    }

    #[test]
    fn bad_fraction_rejected() {
        let spec: SizeSpec<u32> = SizeSpec::Fraction(1.5);
        assert_eq!(spec.validate(), Err(SizeError::BadFraction(1.5)));
    }
}
