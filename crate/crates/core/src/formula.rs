//! Formula ASTs, the ASCII/Unicode parser, classical evaluation, and the
//! strongest-conjunction operator.
//!
//! Grammar (ASCII): atoms `[A-Za-z_][A-Za-z0-9_]*`; constants `T`, `F`;
//! operators `~` (prefix), `&`, `|`, `->`, `<->` with precedence
//! `~ > & > | > -> > <->`. Binary operators parse right-associated.
//! Unicode aliases `¬ ∧ ∨ → ↔` are accepted on input.

use std::fmt;

use thiserror::Error;

use crate::model::{Model, ModelSet, Vocabulary};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("strongest conjunction is undefined for the empty model set")]
    EmptySet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn eval(&self, model: &Model) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var(i) => model.value(*i),
            Formula::Not(f) => !f.eval(model),
            Formula::And(l, r) => l.eval(model) && r.eval(model),
            Formula::Or(l, r) => l.eval(model) || r.eval(model),
            Formula::Implies(l, r) => !l.eval(model) || r.eval(model),
            Formula::Iff(l, r) => l.eval(model) == r.eval(model),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::True | Formula::False | Formula::Var(_) => 5,
            Formula::Not(_) => 4,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Implies(..) => 1,
            Formula::Iff(..) => 0,
        }
    }

    /// Render with minimal parentheses so `parse(pretty(f))` reproduces `f`.
    pub fn pretty(&self, vocab: &Vocabulary) -> String {
        let mut out = String::new();
        self.render(vocab, &mut out);
        out
    }

    fn render(&self, vocab: &Vocabulary, out: &mut String) {
        match self {
            Formula::True => out.push('T'),
            Formula::False => out.push('F'),
            Formula::Var(i) => out.push_str(vocab.name(*i)),
            Formula::Not(f) => {
                out.push('~');
                self.render_child(f, vocab, out, f.precedence() < self.precedence());
            }
            Formula::And(l, r) => self.render_binary(l, "&", r, vocab, out),
            Formula::Or(l, r) => self.render_binary(l, "|", r, vocab, out),
            Formula::Implies(l, r) => self.render_binary(l, "->", r, vocab, out),
            Formula::Iff(l, r) => self.render_binary(l, "<->", r, vocab, out),
        }
    }

    fn render_binary(&self, l: &Formula, op: &str, r: &Formula, vocab: &Vocabulary, out: &mut String) {
        // Right-associated grammar: the left child needs parentheses at equal
        // precedence, the right child does not.
        self.render_child(l, vocab, out, l.precedence() <= self.precedence());
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        self.render_child(r, vocab, out, r.precedence() < self.precedence());
    }

    fn render_child(&self, child: &Formula, vocab: &Vocabulary, out: &mut String, parens: bool) {
        if parens {
            out.push('(');
            child.render(vocab, out);
            out.push(')');
        } else {
            child.render(vocab, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Ident(name) => return write!(f, "`{name}`"),
            Token::True => "`T`",
            Token::False => "`F`",
            Token::Not => "`~`",
            Token::And => "`&`",
            Token::Or => "`|`",
            Token::Implies => "`->`",
            Token::Iff => "`<->`",
            Token::LParen => "`(`",
            Token::RParen => "`)`",
        };
        f.write_str(s)
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let mut tokens = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                tokens.push((offset, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((offset, Token::RParen));
                i += 1;
            }
            '~' | '¬' => {
                tokens.push((offset, Token::Not));
                i += 1;
            }
            '&' | '∧' => {
                tokens.push((offset, Token::And));
                i += 1;
            }
            '|' | '∨' => {
                tokens.push((offset, Token::Or));
                i += 1;
            }
            '→' => {
                tokens.push((offset, Token::Implies));
                i += 1;
            }
            '↔' => {
                tokens.push((offset, Token::Iff));
                i += 1;
            }
            '-' => {
                if i + 1 < chars.len() && chars[i + 1].1 == '>' {
                    tokens.push((offset, Token::Implies));
                    i += 2;
                } else {
                    return Err(FormulaError::Syntax {
                        offset,
                        message: "expected `->`".to_string(),
                    });
                }
            }
            '<' => {
                if i + 2 < chars.len() && chars[i + 1].1 == '-' && chars[i + 2].1 == '>' {
                    tokens.push((offset, Token::Iff));
                    i += 3;
                } else {
                    return Err(FormulaError::Syntax {
                        offset,
                        message: "expected `<->`".to_string(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_')
                {
                    i += 1;
                }
                let name: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let token = match name.as_str() {
                    "T" => Token::True,
                    "F" => Token::False,
                    _ => Token::Ident(name),
                };
                tokens.push((offset, token));
            }
            _ => {
                return Err(FormulaError::Syntax {
                    offset,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    vocab: &'a Vocabulary,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        FormulaError::Syntax { offset: self.offset(), message: message.into() }
    }

    fn parse_iff(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.parse_implies()?;
        if self.peek() == Some(&Token::Iff) {
            self.bump();
            let rhs = self.parse_iff()?;
            Ok(Formula::iff(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Token::Implies) {
            self.bump();
            let rhs = self.parse_implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.parse_and()?;
        if self.peek() == Some(&Token::Or) {
            self.bump();
            let rhs = self.parse_or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_and(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.parse_unary()?;
        if self.peek() == Some(&Token::And) {
            self.bump();
            let rhs = self.parse_and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Token::Not) => {
                self.bump();
                Ok(Formula::not(self.parse_unary()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, FormulaError> {
        match self.bump() {
            Some((_, Token::True)) => Ok(Formula::True),
            Some((_, Token::False)) => Ok(Formula::False),
            Some((_, Token::Ident(name))) => match self.vocab.index_of(&name) {
                Some(i) => Ok(Formula::Var(i)),
                None => Err(FormulaError::UnknownVariable(name)),
            },
            Some((_, Token::LParen)) => {
                let inner = self.parse_iff()?;
                match self.bump() {
                    Some((_, Token::RParen)) => Ok(inner),
                    Some((offset, token)) => Err(FormulaError::Syntax {
                        offset,
                        message: format!("expected `)`, found {token}"),
                    }),
                    None => Err(FormulaError::Syntax {
                        offset: self.end,
                        message: "expected `)`".to_string(),
                    }),
                }
            }
            Some((offset, token)) => Err(FormulaError::Syntax {
                offset,
                message: format!("expected a formula, found {token}"),
            }),
            None => {
                self.pos -= 1;
                Err(self.error("unexpected end of input"))
            }
        }
    }
}

pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, FormulaError> {
    if text.trim().is_empty() {
        return Err(FormulaError::Syntax { offset: 0, message: "empty input".to_string() });
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len(), vocab };
    let formula = parser.parse_iff()?;
    if let Some((offset, token)) = parser.bump() {
        return Err(FormulaError::Syntax {
            offset,
            message: format!("unexpected trailing {token}"),
        });
    }
    Ok(formula)
}

/// The members of `ambient` satisfying `f` under classical semantics.
pub fn models_of(f: &Formula, ambient: &ModelSet) -> ModelSet {
    ModelSet::from_models(ambient.width(), ambient.iter().filter(|m| f.eval(m)))
        .expect("filtering preserves the width")
}

/// The strongest consistent conjunction of literals holding on all of `set`:
/// one literal per variable that is constant across the set, `T` if none.
pub fn strongest_conjunction(set: &ModelSet) -> Result<Formula, FormulaError> {
    if set.is_empty() {
        return Err(FormulaError::EmptySet);
    }
    let mut literals = Vec::new();
    for var in 0..set.width() {
        let mut values = set.iter().map(|m| m.value(var));
        let first = values.next().expect("set is nonempty");
        if values.all(|v| v == first) {
            let atom = Formula::Var(var);
            literals.push(if first { atom } else { Formula::not(atom) });
        }
    }
    Ok(literals.into_iter().rev().fold(None, |acc, lit| match acc {
        None => Some(lit),
        Some(rest) => Some(Formula::and(lit, rest)),
    })
    .unwrap_or(Formula::True))
}

/// Syntactic fragment of a formula; no normalization is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaClass {
    /// A consistent conjunction of literals (`T` counts as the empty one).
    InLAnd,
    /// A disjunction of consistent literal conjunctions.
    InLOrAnd,
    General,
}

fn literal_var(f: &Formula) -> Option<(usize, bool)> {
    match f {
        Formula::Var(i) => Some((*i, true)),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Var(i) => Some((*i, false)),
            _ => None,
        },
        _ => None,
    }
}

fn collect_conjunct_literals(f: &Formula, out: &mut Vec<(usize, bool)>) -> bool {
    match f {
        Formula::And(l, r) => collect_conjunct_literals(l, out) && collect_conjunct_literals(r, out),
        _ => match literal_var(f) {
            Some(lit) => {
                out.push(lit);
                true
            }
            None => false,
        },
    }
}

fn is_consistent_conjunction(f: &Formula) -> bool {
    if matches!(f, Formula::True) {
        return true;
    }
    let mut literals = Vec::new();
    if !collect_conjunct_literals(f, &mut literals) {
        return false;
    }
    literals
        .iter()
        .all(|(var, sign)| !literals.contains(&(*var, !sign)))
}

fn is_disjunction_of_conjunctions(f: &Formula) -> bool {
    match f {
        Formula::Or(l, r) => is_disjunction_of_conjunctions(l) && is_disjunction_of_conjunctions(r),
        _ => is_consistent_conjunction(f),
    }
}

pub fn classify_formula(f: &Formula) -> FormulaClass {
    if is_consistent_conjunction(f) {
        FormulaClass::InLAnd
    } else if is_disjunction_of_conjunctions(f) {
        FormulaClass::InLOrAnd
    } else {
        FormulaClass::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_pq() -> Vocabulary {
        Vocabulary::new(["p", "q"]).unwrap()
    }

    #[test]
    fn parses_conjunction_with_negation() {
        let vocab = vocab_pq();
        let f = parse_formula("p & ~q", &vocab).unwrap();
        assert_eq!(f, Formula::and(Formula::Var(0), Formula::not(Formula::Var(1))));
    }

    #[test]
    fn parses_ross_weakening() {
        let vocab = vocab_pq();
        let f = parse_formula("p | ~q", &vocab).unwrap();
        assert_eq!(f, Formula::or(Formula::Var(0), Formula::not(Formula::Var(1))));
    }

    #[test]
    fn reports_syntax_error_position() {
        let vocab = vocab_pq();
        match parse_formula("p &", &vocab) {
            Err(FormulaError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn reports_unknown_variable() {
        let vocab = vocab_pq();
        assert_eq!(
            parse_formula("p & z", &vocab),
            Err(FormulaError::UnknownVariable("z".to_string()))
        );
    }

    #[test]
    fn accepts_unicode_aliases() {
        let vocab = vocab_pq();
        assert_eq!(
            parse_formula("¬p ∧ q", &vocab).unwrap(),
            parse_formula("~p & q", &vocab).unwrap()
        );
        assert_eq!(
            parse_formula("p → q ↔ q ∨ p", &vocab).unwrap(),
            parse_formula("p -> q <-> q | p", &vocab).unwrap()
        );
    }

    #[test]
    fn models_of_handles_constants_and_ross() {
        let vocab = vocab_pq();
        let u = vocab.universe();
        let ross = parse_formula("p | ~q", &vocab).unwrap();
        assert_eq!(models_of(&ross, &u).bitstrings(), vec!["00", "10", "11"]);
        assert_eq!(models_of(&Formula::True, &u), u);
        let contradiction = parse_formula("p & ~p", &vocab).unwrap();
        assert!(models_of(&contradiction, &u).is_empty());
    }

    #[test]
    fn strongest_conjunction_examples() {
        let vocab = Vocabulary::new(["p", "q", "r"]).unwrap();
        let set = ModelSet::from_bitstrings(3, ["110", "100"]).unwrap();
        let phi = strongest_conjunction(&set).unwrap();
        assert_eq!(phi.pretty(&vocab), "p & ~r");

        let full = vocab.universe();
        assert_eq!(strongest_conjunction(&full).unwrap(), Formula::True);

        let singleton = ModelSet::from_bitstrings(2, ["11"]).unwrap();
        let phi = strongest_conjunction(&singleton).unwrap();
        assert_eq!(phi.pretty(&vocab_pq()), "p & q");

        assert_eq!(strongest_conjunction(&ModelSet::empty(2)), Err(FormulaError::EmptySet));
    }

    #[test]
    fn classification_is_syntactic() {
        let vocab = vocab_pq();
        let f = parse_formula("p & ~q", &vocab).unwrap();
        assert_eq!(classify_formula(&f), FormulaClass::InLAnd);
        let f = parse_formula("~(p & q)", &vocab).unwrap();
        assert_eq!(classify_formula(&f), FormulaClass::General);
        let f = parse_formula("(p & q) | (~p & ~q)", &vocab).unwrap();
        assert_eq!(classify_formula(&f), FormulaClass::InLOrAnd);
        // Inconsistent conjunctions are excluded from both fragments.
        let f = parse_formula("p & ~p", &vocab).unwrap();
        assert_eq!(classify_formula(&f), FormulaClass::General);
    }

    #[test]
    fn pretty_round_trip() {
        let vocab = vocab_pq();
        for text in ["p & q | ~p", "(p | q) & q", "p -> q -> p", "(p -> q) -> p", "~(p <-> q)"] {
            let f = parse_formula(text, &vocab).unwrap();
            let reparsed = parse_formula(&f.pretty(&vocab), &vocab).unwrap();
            assert_eq!(f, reparsed, "round trip failed for {text}");
        }
    }
}
