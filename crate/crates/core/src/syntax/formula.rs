use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use super::vocab::{PredId, Vocabulary};
use crate::error::{Error, Result};
use crate::vars::{Var, VarSet};

/// LFD formulas after desugaring.
///
/// The core connectives are predicate atoms, negation, conjunction, the
/// dependence quantifier `Quant(X, φ)` and the dependence atom `Dep(X, y)`.
/// `Eq` and `Incl` extend the language with equality and local inclusion
/// atoms; they are evaluated natively but rejected by closure and type
/// machinery.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(PredId, Vec<Var>),
    Eq(Var, Var),
    Incl(Vec<Var>, Vec<Var>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Quant(VarSet, Box<Formula>),
    Dep(VarSet, Var),
}

impl Formula {
    pub fn atom(p: PredId, args: impl IntoIterator<Item = Var>) -> Self {
        Formula::Atom(p, args.into_iter().collect())
    }

    pub fn dep(x: VarSet, y: Var) -> Self {
        Formula::Dep(x, y)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn quant(x: VarSet, f: Formula) -> Self {
        Formula::Quant(x, Box::new(f))
    }

    /// The dual modality, `¬𝔻_X¬φ`.
    pub fn exists(x: VarSet, f: Formula) -> Self {
        Formula::not(Formula::quant(x, Formula::not(f)))
    }

    /// `¬(¬a ∧ ¬b)`
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `¬(a ∧ ¬b)`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    /// Conjunction of `D_Xy` for every `y ∈ ys`; `None` for an empty `ys`.
    pub fn dep_set(x: VarSet, ys: VarSet) -> Option<Self> {
        ys.iter()
            .map(|y| Formula::Dep(x, y))
            .reduce(Formula::and)
    }

    /// Free variables.
    pub fn free_vars(&self) -> VarSet {
        match self {
            Formula::Atom(_, args) => args.iter().copied().collect(),
            Formula::Eq(x, y) => VarSet::singleton(*x).with(*y),
            Formula::Incl(xs, ys) => xs.iter().chain(ys).copied().collect(),
            Formula::Not(f) => f.free_vars(),
            Formula::And(a, b) => a.free_vars().union(b.free_vars()),
            Formula::Quant(x, _) | Formula::Dep(x, _) => *x,
        }
    }

    /// Every variable occurring anywhere in the formula.
    pub fn vars(&self) -> VarSet {
        match self {
            Formula::Atom(..) | Formula::Eq(..) | Formula::Incl(..) => self.free_vars(),
            Formula::Not(f) => f.vars(),
            Formula::And(a, b) => a.vars().union(b.vars()),
            Formula::Quant(x, f) => x.union(f.vars()),
            Formula::Dep(x, y) => x.with(*y),
        }
    }

    /// Predicates occurring in the formula, sorted and deduplicated.
    pub fn predicates(&self) -> Vec<PredId> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p, _) = f {
                out.push(*p);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    /// Pre-order traversal of all subformulas, including `self`.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Quant(_, a) => a.visit(f),
            Formula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Nesting depth of dependence quantifiers.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Not(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Quant(_, f) => 1 + f.modal_depth(),
            _ => 0,
        }
    }

    /// True if the formula uses only the core LFD connectives.
    pub fn is_core(&self) -> bool {
        let mut core = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Eq(..) | Formula::Incl(..)) {
                core = false;
            }
        });
        core
    }

    pub fn contains_dep_atom(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if matches!(f, Formula::Dep(..)) {
                found = true;
            }
        });
        found
    }

    /// Rename every symbol of `self` from vocabulary `from` into `to`, by name.
    pub fn transfer(&self, from: &Vocabulary, to: &Vocabulary) -> Result<Formula> {
        let var = |v: Var| to.map_var(from, v);
        let set = |s: VarSet| -> Result<VarSet> {
            s.iter().map(|v| to.map_var(from, v)).collect::<Result<_>>()
        };
        Ok(match self {
            Formula::Atom(p, args) => Formula::Atom(
                to.map_pred(from, *p)?,
                args.iter().map(|v| var(*v)).collect::<Result<_>>()?,
            ),
            Formula::Eq(x, y) => Formula::Eq(var(*x)?, var(*y)?),
            Formula::Incl(xs, ys) => Formula::Incl(
                xs.iter().map(|v| var(*v)).collect::<Result<_>>()?,
                ys.iter().map(|v| var(*v)).collect::<Result<_>>()?,
            ),
            Formula::Not(f) => Formula::not(f.transfer(from, to)?),
            Formula::And(a, b) => Formula::and(a.transfer(from, to)?, b.transfer(from, to)?),
            Formula::Quant(x, f) => Formula::quant(set(*x)?, f.transfer(from, to)?),
            Formula::Dep(x, y) => Formula::Dep(set(*x)?, var(*y)?),
        })
    }

    /// Check that every symbol is declared in `vocab` with the right arity.
    pub fn check(&self, vocab: &Vocabulary) -> Result<()> {
        let mut err = None;
        self.visit(&mut |f| {
            if err.is_some() {
                return;
            }
            if let Formula::Atom(p, args) = f {
                if p.0 >= vocab.num_preds() {
                    err = Some(Error::UnknownPredicate(alloc::format!("#{}", p.0)));
                } else if vocab.arity(*p) != args.len() {
                    err = Some(Error::ArityMismatch {
                        predicate: vocab.pred_name(*p).into(),
                        expected: vocab.arity(*p),
                        found: args.len(),
                    });
                }
            }
            if let Formula::Incl(xs, ys) = f {
                if xs.len() != ys.len() {
                    err = Some(Error::InvalidArgument(
                        "inclusion atom with tuples of different length".into(),
                    ));
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if !self.vars().is_subset(vocab.all_vars()) {
            return Err(Error::UnknownVariable(alloc::format!(
                "{:?}",
                self.vars().difference(vocab.all_vars())
            )));
        }
        Ok(())
    }

    /// Pretty-printer in the concrete syntax accepted by the parser.
    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> Printed<'a> {
        Printed {
            formula: self,
            vocab,
        }
    }
}

/// A formula paired with its vocabulary for printing.
pub struct Printed<'a> {
    formula: &'a Formula,
    vocab: &'a Vocabulary,
}

impl Printed<'_> {
    fn conj(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            Formula::And(a, b) => {
                self.conj(a, out)?;
                out.write_str(" & ")?;
                self.unary(b, out)
            }
            _ => self.unary(f, out),
        }
    }

    fn unary(&self, f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.vocab;
        match f {
            Formula::Atom(p, args) => write!(out, "{}({})", v.pred_name(*p), v.show_tuple(args)),
            Formula::Eq(x, y) => write!(out, "{} = {}", v.var_name(*x), v.var_name(*y)),
            Formula::Incl(xs, ys) => write!(
                out,
                "inc(({}),({}))",
                v.show_tuple(xs),
                v.show_tuple(ys)
            ),
            Formula::Dep(x, y) => write!(out, "dep({},{})", v.show_set(*x), v.var_name(*y)),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Quant(x, body) => match body.as_ref() {
                    Formula::Not(b) => {
                        write!(out, "E{} ", v.show_set(*x))?;
                        self.unary(b, out)
                    }
                    _ => {
                        out.write_str("!")?;
                        self.unary(inner, out)
                    }
                },
                _ => {
                    out.write_str("!")?;
                    self.unary(inner, out)
                }
            },
            Formula::Quant(x, body) => {
                write!(out, "D{} ", v.show_set(*x))?;
                self.unary(body, out)
            }
            Formula::And(..) => {
                out.write_str("(")?;
                self.conj(f, out)?;
                out.write_str(")")
            }
        }
    }
}

impl fmt::Display for Printed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.conj(self.formula, f)
    }
}
