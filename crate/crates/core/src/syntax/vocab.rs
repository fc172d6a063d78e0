use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vars::{Var, VarSet, MAX_VARS};

/// Index of a predicate symbol in its vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub usize);

/// A finite vocabulary `(V, τ)` with its arity map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    variables: Vec<String>,
    predicates: Vec<(String, usize)>,
}

/// Identifiers are `[A-Za-z_][A-Za-z0-9_]*`. The prime is reserved for the
/// copied variables of the first-order translation.
pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const RESERVED_PREDICATES: [&str; 2] = ["dep", "inc"];

impl Vocabulary {
    pub fn new(variables: Vec<String>, predicates: Vec<(String, usize)>) -> Result<Self> {
        if variables.len() > MAX_VARS {
            return Err(Error::InvalidVocabulary(format!(
                "at most {MAX_VARS} variables are supported, got {}",
                variables.len()
            )));
        }
        for (i, v) in variables.iter().enumerate() {
            if v.contains('\'') {
                return Err(Error::InvalidVocabulary(format!(
                    "variable `{v}` uses the reserved prime suffix"
                )));
            }
            if !is_ident(v) {
                return Err(Error::InvalidVocabulary(format!(
                    "`{v}` is not a valid variable name"
                )));
            }
            if variables[..i].contains(v) {
                return Err(Error::InvalidVocabulary(format!("duplicate variable `{v}`")));
            }
        }
        for (i, (p, _)) in predicates.iter().enumerate() {
            if !is_ident(p) {
                return Err(Error::InvalidVocabulary(format!(
                    "`{p}` is not a valid predicate name"
                )));
            }
            if RESERVED_PREDICATES.contains(&p.as_str()) {
                return Err(Error::InvalidVocabulary(format!(
                    "`{p}` is a reserved word"
                )));
            }
            if predicates[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidVocabulary(format!("duplicate predicate `{p}`")));
            }
        }
        Ok(Vocabulary {
            variables,
            predicates,
        })
    }

    /// Convenience constructor from string slices; panics on invalid input.
    pub fn from_names(variables: &[&str], predicates: &[(&str, usize)]) -> Self {
        Self::new(
            variables.iter().map(|s| s.to_string()).collect(),
            predicates
                .iter()
                .map(|(p, a)| (p.to_string(), *a))
                .collect(),
        )
        .expect("valid vocabulary")
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_preds(&self) -> usize {
        self.predicates.len()
    }

    pub fn all_vars(&self) -> VarSet {
        VarSet::full(self.variables.len())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.variables.len()).map(Var)
    }

    pub fn preds(&self) -> impl Iterator<Item = PredId> {
        (0..self.predicates.len()).map(PredId)
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.variables.iter().position(|v| v == name).map(Var)
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.variables[v.0]
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn pred(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|(p, _)| p == name).map(PredId)
    }

    pub fn pred_name(&self, p: PredId) -> &str {
        &self.predicates[p.0].0
    }

    pub fn arity(&self, p: PredId) -> usize {
        self.predicates[p.0].1
    }

    pub fn predicates(&self) -> &[(String, usize)] {
        &self.predicates
    }

    /// The sub-vocabulary keeping only `vars` and `preds`, in the original order.
    pub fn restrict(&self, vars: VarSet, preds: &[PredId]) -> Vocabulary {
        Vocabulary {
            variables: vars.iter().map(|v| self.variables[v.0].clone()).collect(),
            predicates: self
                .preds()
                .filter(|p| preds.contains(p))
                .map(|p| self.predicates[p.0].clone())
                .collect(),
        }
    }

    /// Look up the variable named `name` of `other` in `self`.
    pub fn map_var(&self, other: &Vocabulary, v: Var) -> Result<Var> {
        let name = other.var_name(v);
        self.var(name)
            .ok_or_else(|| Error::VocabularyMismatch(format!("variable `{name}` is not declared")))
    }

    /// Look up the predicate of `other` in `self`, checking its arity.
    pub fn map_pred(&self, other: &Vocabulary, p: PredId) -> Result<PredId> {
        let name = other.pred_name(p);
        let q = self.pred(name).ok_or_else(|| {
            Error::VocabularyMismatch(format!("predicate `{name}` is not declared"))
        })?;
        if self.arity(q) != other.arity(p) {
            return Err(Error::VocabularyMismatch(format!(
                "predicate `{name}` has arity {} here but {} in the source vocabulary",
                self.arity(q),
                other.arity(p)
            )));
        }
        Ok(q)
    }

    /// Render a variable set as `{x,y}`.
    pub fn show_set(&self, set: VarSet) -> String {
        let mut s = String::from("{");
        for (i, v) in set.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(self.var_name(v));
        }
        s.push('}');
        s
    }

    /// Render a variable tuple as `x,y`.
    pub fn show_tuple(&self, vars: &[Var]) -> String {
        let mut s = String::new();
        for (i, v) in vars.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(self.var_name(*v));
        }
        s
    }
}
