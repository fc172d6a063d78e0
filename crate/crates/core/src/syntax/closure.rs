//! The closure set `Cl({ψ})`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::formula::Formula;
use super::vocab::Vocabulary;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::vars::{Var, VarSet};

/// The finite closure `Ψ = Cl({ψ})` of a seed formula.
///
/// Formulas are re-indexed into a local vocabulary holding only the
/// variables and predicates occurring in `ψ` (so `V_ψ` is the full local
/// variable set). Members are ordered by size, then structurally, so every
/// formula comes after its proper subformulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureSet {
    source: Vocabulary,
    vocab: Vocabulary,
    formulas: Vec<Formula>,
    index: BTreeMap<Formula, usize>,
    free: Vec<VarSet>,
    neg: Vec<Option<usize>>,
    deps: Vec<usize>,
    masks: Vec<BitSet>,
    origin: usize,
}

fn add_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    f.visit(&mut |g| {
        out.insert(g.clone());
    });
}

/// Close `seeds` under subformulas, dependence atoms over `vars`, and one
/// round of negations.
fn close(seeds: impl IntoIterator<Item = Formula>, vars: VarSet) -> BTreeSet<Formula> {
    let mut set = BTreeSet::new();
    for s in seeds {
        add_subformulas(&s, &mut set);
    }
    for x in vars.subsets() {
        for y in vars.iter() {
            set.insert(Formula::Dep(x, y));
        }
    }
    let negs: Vec<Formula> = set
        .iter()
        .filter(|f| !matches!(f, Formula::Not(_)))
        .map(|f| Formula::not(f.clone()))
        .collect();
    set.extend(negs);
    set
}

/// Build `Cl({ψ})` for a core formula `ψ` over `vocab`.
pub fn closure(psi: &Formula, vocab: &Vocabulary) -> Result<ClosureSet> {
    psi.check(vocab)?;
    if !psi.is_core() {
        return Err(Error::UnsupportedAtom(
            "closure sets are defined for core LFD without equality or inclusion atoms".into(),
        ));
    }
    let local = vocab.restrict(psi.vars(), &psi.predicates());
    let seed = psi.transfer(vocab, &local)?;
    let set = close([seed.clone()], local.all_vars());
    let mut formulas: Vec<Formula> = set.into_iter().collect();
    formulas.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    let index: BTreeMap<Formula, usize> = formulas
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let free = formulas.iter().map(Formula::free_vars).collect();
    let neg = formulas
        .iter()
        .map(|f| index.get(&Formula::not(f.clone())).copied())
        .collect();
    let k = local.num_vars();
    let mut deps = Vec::with_capacity((1 << k) * k);
    for x in 0..(1u32 << k) {
        for y in 0..k {
            deps.push(index[&Formula::Dep(VarSet::from_bits(x), Var(y))]);
        }
    }
    let origin = index[&seed];
    let masks = (0..(1u32 << k))
        .map(|d| {
            let d = VarSet::from_bits(d);
            BitSet::from_indices(
                formulas.len(),
                formulas.iter().enumerate().filter(|(_, f)| f.free_vars().is_subset(d)).map(|(i, _)| i),
            )
        })
        .collect();
    Ok(ClosureSet {
        source: vocab.clone(),
        vocab: local,
        formulas,
        index,
        free,
        neg,
        deps,
        masks,
        origin,
    })
}

impl ClosureSet {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// The local vocabulary: variables `V_ψ` and the predicates of `ψ`.
    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// The vocabulary `ψ` was originally written over.
    pub fn source_vocab(&self) -> &Vocabulary {
        &self.source
    }

    /// `V_ψ`, as a local variable set.
    pub fn relevant_vars(&self) -> VarSet {
        self.vocab.all_vars()
    }

    pub fn num_vars(&self) -> usize {
        self.vocab.num_vars()
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn formula(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    /// Index of the seed formula `ψ`.
    pub fn origin(&self) -> usize {
        self.origin
    }

    /// Index of a formula given over the local vocabulary.
    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn free(&self, i: usize) -> VarSet {
        self.free[i]
    }

    /// Index of `¬φ_i`, if it is a member.
    pub fn neg(&self, i: usize) -> Option<usize> {
        self.neg[i]
    }

    pub fn is_negation(&self, i: usize) -> bool {
        matches!(self.formulas[i], Formula::Not(_))
    }

    /// Index of `D_Xy` (local variables).
    pub fn dep(&self, x: VarSet, y: Var) -> usize {
        self.deps[x.bits() as usize * self.num_vars() + y.0]
    }

    /// Number of members that are not explicit negations.
    pub fn positive_count(&self) -> usize {
        (0..self.len()).filter(|&i| !self.is_negation(i)).count()
    }

    /// Members whose free variables lie inside `x` (local variables).
    pub fn mask_within(&self, x: VarSet) -> &BitSet {
        &self.masks[x.intersection(self.relevant_vars()).bits() as usize]
    }

    /// Member `i` rewritten into `vocab` by symbol names.
    pub fn formula_in(&self, i: usize, vocab: &Vocabulary) -> Result<Formula> {
        self.formulas[i].transfer(&self.vocab, vocab)
    }

    /// A formula over the source vocabulary rewritten into the local one.
    pub fn localize(&self, f: &Formula) -> Result<Formula> {
        f.transfer(&self.source, &self.vocab)
    }

    pub fn show(&self, i: usize) -> String {
        self.formulas[i].display(&self.vocab).to_string()
    }

    /// Re-closing the members adds nothing.
    pub fn is_closed(&self) -> bool {
        let again = close(self.formulas.iter().cloned(), self.relevant_vars());
        again.len() == self.len() && again.iter().all(|f| self.index.contains_key(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn voc() -> Vocabulary {
        Vocabulary::from_names(&["x", "y", "z"], &[("P", 1), ("R", 2)])
    }

    fn cl(s: &str) -> ClosureSet {
        let v = voc();
        closure(&parse_formula(s, &v).unwrap(), &v).unwrap()
    }

    #[test]
    fn dependence_atom_closure_has_sixteen_members() {
        let c = cl("dep({x},y)");
        assert_eq!(c.len(), 16);
        assert_eq!(c.relevant_vars().len(), 2);
        assert_eq!(c.positive_count(), 8);
        assert!(c.is_closed());
    }

    #[test]
    fn predicate_atom_closure() {
        let c = cl("P(x)");
        let mut shown: Vec<String> = (0..c.len()).map(|i| c.show(i)).collect();
        shown.sort();
        assert_eq!(
            shown,
            [
                "!P(x)",
                "!dep({x},x)",
                "!dep({},x)",
                "P(x)",
                "dep({x},x)",
                "dep({},x)"
            ]
        );
    }

    #[test]
    fn negations_are_not_doubled() {
        let c = cl("!!P(x)");
        for i in 0..c.len() {
            let doubly = matches!(c.formula(i), Formula::Not(f) if matches!(**f, Formula::Not(_)));
            if doubly {
                assert_eq!(c.show(i), "!!P(x)");
            }
        }
        assert!(c.index_of(&c.formula(c.origin()).clone()).is_some());
        assert!(c.is_closed());
    }

    #[test]
    fn members_follow_their_subformulas() {
        let c = cl("D{x} (P(y) & !R(x,z))");
        for i in 0..c.len() {
            c.formula(i).visit(&mut |g| {
                assert!(c.index_of(g).unwrap() <= i);
            });
        }
        assert_eq!(c.formula(c.origin()).size(), 5);
    }

    #[test]
    fn rejects_non_core_formulas() {
        let v = voc();
        let f = parse_formula("x = y", &v).unwrap();
        assert!(matches!(closure(&f, &v), Err(Error::UnsupportedAtom(_))));
    }
}
