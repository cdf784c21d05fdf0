//! Propositional vocabulary, bit-vector models, and extensional model sets.
//!
//! A model over a vocabulary of `n` variables is a total truth assignment
//! stored as a fixed-width bit vector. The canonical text form is a bitstring
//! in vocabulary order, leftmost character = first variable, so `"110"` over
//! `(p, q, r)` makes `p` and `q` true and `r` false.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Exhaustive algorithms enumerate all `2^n` models, so the width is capped.
pub const MAX_VARS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("vocabulary must contain between 1 and {MAX_VARS} variables, got {0}")]
    BadVocabularySize(usize),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    BadVariableName(String),
    #[error("bitstring `{0}` has width {1}, expected {2}")]
    BadBitstringWidth(String, usize, usize),
    #[error("bitstring `{0}` contains a character other than 0/1")]
    BadBitstringChar(String),
    #[error("model width {0} does not match expected width {1}")]
    WidthMismatch(usize, usize),
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An ordered sequence of distinct propositional variable names.
///
/// The order is fixed and canonical for all serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    names: Vec<String>,
}

impl Vocabulary {
    pub fn new<I, S>(names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_VARS {
            return Err(ModelError::BadVocabularySize(names.len()));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !is_valid_name(name) {
                return Err(ModelError::BadVariableName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateVariable(name.clone()));
            }
        }
        Ok(Vocabulary { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The set of all `2^n` models over this vocabulary.
    pub fn universe(&self) -> ModelSet {
        let width = self.len();
        let models = (0u32..1 << width).map(|bits| Model { bits, width: width as u8 });
        ModelSet::from_models(width, models).expect("universe models share the vocabulary width")
    }
}

/// A total truth assignment; bit `i` holds the value of variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Model {
    bits: u32,
    width: u8,
}

impl Model {
    pub fn new(bits: u32, width: usize) -> Self {
        assert!(width >= 1 && width <= MAX_VARS);
        assert!(bits < (1u32 << width), "bits exceed model width");
        Model { bits, width: width as u8 }
    }

    pub fn from_bitstring(text: &str) -> Result<Self, ModelError> {
        let width = text.chars().count();
        if width == 0 || width > MAX_VARS {
            return Err(ModelError::BadBitstringWidth(text.to_string(), width, width));
        }
        let mut bits = 0u32;
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(ModelError::BadBitstringChar(text.to_string())),
            }
        }
        Ok(Model { bits, width: width as u8 })
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn value(&self, var: usize) -> bool {
        debug_assert!(var < self.width());
        self.bits & (1 << var) != 0
    }

    pub fn with_value(&self, var: usize, value: bool) -> Model {
        debug_assert!(var < self.width());
        let bits = if value { self.bits | (1 << var) } else { self.bits & !(1 << var) };
        Model { bits, width: self.width }
    }

    /// Key under which bitstring-lexicographic order equals numeric order.
    fn lex_key(&self) -> u32 {
        self.bits.reverse_bits() >> (32 - self.width as u32)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.value(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl PartialOrd for Model {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Model {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.width, self.lex_key()).cmp(&(other.width, other.lex_key()))
    }
}

/// An extensional set of models sharing one vocabulary width.
///
/// Iteration order is bitstring-lexicographic, which keeps every derived
/// artifact (witnesses, reports, golden files) deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModelSet {
    width: usize,
    models: BTreeSet<Model>,
}

impl ModelSet {
    pub fn empty(width: usize) -> Self {
        ModelSet { width, models: BTreeSet::new() }
    }

    pub fn from_models<I>(width: usize, models: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Model>,
    {
        let mut set = ModelSet::empty(width);
        for m in models {
            set.insert(m)?;
        }
        Ok(set)
    }

    pub fn from_bitstrings<'a, I>(width: usize, strings: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let models: Result<Vec<Model>, ModelError> =
            strings.into_iter().map(Model::from_bitstring).collect();
        ModelSet::from_models(width, models?)
    }

    pub fn insert(&mut self, model: Model) -> Result<bool, ModelError> {
        if model.width() != self.width {
            return Err(ModelError::WidthMismatch(model.width(), self.width));
        }
        Ok(self.models.insert(model))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn contains(&self, model: &Model) -> bool {
        self.models.contains(model)
    }

    pub fn iter(&self) -> impl Iterator<Item = Model> + '_ {
        self.models.iter().copied()
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.models.is_subset(&other.models)
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        ModelSet { width: self.width, models: self.models.union(&other.models).copied().collect() }
    }

    pub fn intersection(&self, other: &ModelSet) -> ModelSet {
        ModelSet {
            width: self.width,
            models: self.models.intersection(&other.models).copied().collect(),
        }
    }

    pub fn difference(&self, other: &ModelSet) -> ModelSet {
        ModelSet {
            width: self.width,
            models: self.models.difference(&other.models).copied().collect(),
        }
    }

    /// Canonical form: bitstrings in lexicographic order.
    pub fn bitstrings(&self) -> Vec<String> {
        self.iter().map(|m| m.to_string()).collect()
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.bitstrings().join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_rejects_duplicates_and_bad_sizes() {
        assert!(Vocabulary::new(["p", "q"]).is_ok());
        assert_eq!(
            Vocabulary::new(["p", "p"]),
            Err(ModelError::DuplicateVariable("p".to_string()))
        );
        assert_eq!(Vocabulary::new(Vec::<String>::new()), Err(ModelError::BadVocabularySize(0)));
        let too_many: Vec<String> = (0..25).map(|i| format!("v{i}")).collect();
        assert_eq!(Vocabulary::new(too_many), Err(ModelError::BadVocabularySize(25)));
    }

    #[test]
    fn bitstring_round_trip_is_leftmost_first() {
        let m = Model::from_bitstring("110").unwrap();
        assert!(m.value(0));
        assert!(m.value(1));
        assert!(!m.value(2));
        assert_eq!(m.to_string(), "110");
    }

    #[test]
    fn model_order_is_bitstring_lexicographic() {
        let strings = ["00", "01", "10", "11"];
        let mut models: Vec<Model> =
            strings.iter().map(|s| Model::from_bitstring(s).unwrap()).collect();
        models.sort();
        let sorted: Vec<String> = models.iter().map(|m| m.to_string()).collect();
        assert_eq!(sorted, strings);
    }

    #[test]
    fn model_set_enforces_width() {
        let mut set = ModelSet::empty(2);
        assert!(set.insert(Model::from_bitstring("10").unwrap()).is_ok());
        assert_eq!(
            set.insert(Model::from_bitstring("101").unwrap()),
            Err(ModelError::WidthMismatch(3, 2))
        );
    }

    #[test]
    fn universe_has_all_models() {
        let vocab = Vocabulary::new(["p", "q"]).unwrap();
        let u = vocab.universe();
        assert_eq!(u.len(), 4);
        assert_eq!(u.bitstrings(), vec!["00", "01", "10", "11"]);
    }
}
