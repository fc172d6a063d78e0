//! The first-order translation `tr`, the structures `T(𝕄)`, and a finite
//! first-order model checker.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::semantics::{Assignment, DependenceModel, Obj};
use crate::syntax::{Formula, PredId, Vocabulary};
use crate::vars::{Var, VarSet};

/// A first-order variable: an original `x ∈ V` or its copy `x' ∈ V'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoVar {
    Orig(Var),
    Copy(Var),
}

impl FoVar {
    fn slot(self, k: usize) -> usize {
        match self {
            FoVar::Orig(v) => v.0,
            FoVar::Copy(v) => k + v.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FoFormula {
    Pred(PredId, Vec<FoVar>),
    /// The team predicate `A`.
    Team(Vec<FoVar>),
    Eq(FoVar, FoVar),
    Not(Box<FoFormula>),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Forall(Vec<FoVar>, Box<FoFormula>),
    Exists(Vec<FoVar>, Box<FoFormula>),
}

impl FoFormula {
    pub fn free_vars(&self) -> BTreeSet<FoVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<FoVar>) {
        match self {
            FoFormula::Pred(_, xs) | FoFormula::Team(xs) => out.extend(xs.iter().copied()),
            FoFormula::Eq(a, b) => {
                out.insert(*a);
                out.insert(*b);
            }
            FoFormula::Not(f) => f.collect_free(out),
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().for_each(|f| f.collect_free(out)),
            FoFormula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            FoFormula::Forall(bound, f) | FoFormula::Exists(bound, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                out.extend(inner.into_iter().filter(|v| !bound.contains(v)));
            }
        }
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocabulary) -> FoPrinted<'a> {
        FoPrinted {
            f: self,
            vocab,
            tptp: false,
        }
    }

    /// TPTP first-order syntax: variables `V_x`/`W_x`, predicates `p_P`,
    /// team predicate `team`.
    pub fn tptp<'a>(&'a self, vocab: &'a Vocabulary) -> FoPrinted<'a> {
        FoPrinted {
            f: self,
            vocab,
            tptp: true,
        }
    }
}

pub struct FoPrinted<'a> {
    f: &'a FoFormula,
    vocab: &'a Vocabulary,
    tptp: bool,
}

impl FoPrinted<'_> {
    fn var(&self, v: FoVar, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (v, self.tptp) {
            (FoVar::Orig(x), false) => write!(out, "{}", self.vocab.var_name(x)),
            (FoVar::Copy(x), false) => write!(out, "{}'", self.vocab.var_name(x)),
            (FoVar::Orig(x), true) => write!(out, "V_{}", self.vocab.var_name(x)),
            (FoVar::Copy(x), true) => write!(out, "W_{}", self.vocab.var_name(x)),
        }
    }

    fn args(&self, xs: &[FoVar], out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str("(")?;
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                out.write_str(",")?;
            }
            self.var(*x, out)?;
        }
        out.write_str(")")
    }

    fn go(&self, f: &FoFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.tptp;
        match f {
            FoFormula::Pred(p, xs) => {
                if t {
                    write!(out, "p_{}", self.vocab.pred_name(*p))?;
                } else {
                    out.write_str(self.vocab.pred_name(*p))?;
                }
                if xs.is_empty() && t {
                    return Ok(());
                }
                self.args(xs, out)
            }
            FoFormula::Team(xs) => {
                out.write_str(if t { "team" } else { "A" })?;
                if xs.is_empty() && t {
                    return Ok(());
                }
                self.args(xs, out)
            }
            FoFormula::Eq(a, b) => {
                self.var(*a, out)?;
                out.write_str(" = ")?;
                self.var(*b, out)
            }
            FoFormula::Not(g) => {
                out.write_str(if t { "~" } else { "¬" })?;
                self.atomic(g, out)
            }
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                let is_and = matches!(f, FoFormula::And(_));
                if fs.is_empty() {
                    return out.write_str(match (is_and, t) {
                        (true, true) => "$true",
                        (false, true) => "$false",
                        (true, false) => "⊤",
                        (false, false) => "⊥",
                    });
                }
                let op = match (is_and, t) {
                    (true, true) => " & ",
                    (false, true) => " | ",
                    (true, false) => " ∧ ",
                    (false, false) => " ∨ ",
                };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        out.write_str(op)?;
                    }
                    self.atomic(g, out)?;
                }
                Ok(())
            }
            FoFormula::Implies(a, b) => {
                self.atomic(a, out)?;
                out.write_str(if t { " => " } else { " → " })?;
                self.atomic(b, out)
            }
            FoFormula::Forall(vs, g) | FoFormula::Exists(vs, g) => {
                let univ = matches!(f, FoFormula::Forall(..));
                if vs.is_empty() {
                    return self.go(g, out);
                }
                if t {
                    out.write_str(if univ { "![" } else { "?[" })?;
                    for (i, v) in vs.iter().enumerate() {
                        if i > 0 {
                            out.write_str(",")?;
                        }
                        self.var(*v, out)?;
                    }
                    out.write_str("]: ")?;
                } else {
                    for v in vs {
                        out.write_str(if univ { "∀" } else { "∃" })?;
                        self.var(*v, out)?;
                    }
                    out.write_str(" ")?;
                }
                self.atomic(g, out)
            }
        }
    }

    fn atomic(&self, f: &FoFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let simple = match f {
            FoFormula::Pred(..) | FoFormula::Team(..) | FoFormula::Eq(..) | FoFormula::Not(_) => true,
            FoFormula::And(fs) | FoFormula::Or(fs) => fs.len() <= 1,
            FoFormula::Forall(..) | FoFormula::Exists(..) => !self.tptp,
            _ => false,
        };
        if simple {
            self.go(f, out)
        } else {
            out.write_str("(")?;
            self.go(f, out)?;
            out.write_str(")")
        }
    }
}

impl fmt::Display for FoPrinted<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.go(self.f, out)
    }
}

/// `tr(φ)` over the variables of `vocab`, enumerated in declaration order.
pub fn translate(f: &Formula, vocab: &Vocabulary) -> Result<FoFormula> {
    f.check(vocab)?;
    Ok(tr(f, vocab))
}

fn tr(f: &Formula, vocab: &Vocabulary) -> FoFormula {
    let all = vocab.all_vars();
    let v: Vec<FoVar> = all.iter().map(FoVar::Orig).collect();
    match f {
        Formula::Atom(p, xs) => FoFormula::Pred(*p, xs.iter().map(|x| FoVar::Orig(*x)).collect()),
        Formula::Eq(x, y) => FoFormula::Eq(FoVar::Orig(*x), FoVar::Orig(*y)),
        Formula::Incl(xs, ys) => FoFormula::Exists(
            all.iter().map(FoVar::Copy).collect(),
            Box::new(FoFormula::And(
                core::iter::once(FoFormula::Team(all.iter().map(FoVar::Copy).collect()))
                    .chain(
                        xs.iter()
                            .zip(ys)
                            .map(|(x, y)| FoFormula::Eq(FoVar::Orig(*x), FoVar::Copy(*y))),
                    )
                    .collect(),
            )),
        ),
        Formula::Not(g) => FoFormula::Not(Box::new(tr(g, vocab))),
        Formula::And(a, b) => FoFormula::And(vec![tr(a, vocab), tr(b, vocab)]),
        Formula::Quant(x, g) => FoFormula::Forall(
            all.difference(*x).iter().map(FoVar::Orig).collect(),
            Box::new(FoFormula::Implies(
                Box::new(FoFormula::Team(v)),
                Box::new(tr(g, vocab)),
            )),
        ),
        Formula::Dep(x, y) => {
            if x.contains(*y) {
                return FoFormula::And(
                    x.iter()
                        .map(|u| FoFormula::Eq(FoVar::Orig(u), FoVar::Orig(u)))
                        .collect(),
                );
            }
            let z = all.difference(*x);
            let primed: Vec<FoVar> = all
                .iter()
                .map(|u| if z.contains(u) { FoVar::Copy(u) } else { FoVar::Orig(u) })
                .collect();
            FoFormula::Forall(
                z.iter().map(FoVar::Orig).chain(z.iter().map(FoVar::Copy)).collect(),
                Box::new(FoFormula::Implies(
                    Box::new(FoFormula::And(vec![FoFormula::Team(v), FoFormula::Team(primed)])),
                    Box::new(FoFormula::Eq(FoVar::Orig(*y), FoVar::Copy(*y))),
                )),
            )
        }
    }
}

/// A `τ ∪ {A}` structure: the relations of `vocab` plus the team predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoStructure {
    pub vocab: Vocabulary,
    pub domain: Vec<String>,
    pub interpretation: Vec<BTreeSet<Vec<Obj>>>,
    /// `I(A)`, tuples of length `|V|`.
    pub team: BTreeSet<Vec<Obj>>,
}

/// `T(𝕄)`
pub fn encode_structure(m: &DependenceModel) -> FoStructure {
    FoStructure {
        vocab: m.vocab.clone(),
        domain: m.domain.clone(),
        interpretation: m.interpretation.clone(),
        team: m.team.iter().map(|s| s.0.clone()).collect(),
    }
}

/// The unique dependence model whose encoding is `s`; the team is listed in
/// tuple order.
pub fn decode_structure(s: &FoStructure) -> Result<DependenceModel> {
    let k = s.vocab.num_vars();
    if let Some(t) = s.team.iter().find(|t| t.len() != k) {
        return Err(Error::ArityMismatch {
            predicate: "A".into(),
            expected: k,
            found: t.len(),
        });
    }
    DependenceModel::new(
        s.vocab.clone(),
        s.domain.clone(),
        s.interpretation.clone(),
        s.team.iter().map(|t| Assignment(t.clone())).collect(),
    )
}

/// An assignment to `V ∪ V'`, undefined slots as `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoAssignment {
    slots: Vec<Option<Obj>>,
}

impl FoAssignment {
    pub fn new(k: usize) -> Self {
        FoAssignment {
            slots: vec![None; 2 * k],
        }
    }

    /// `s⁺`: `s` on `V`, `copies` on `V'`.
    pub fn extend(s: &Assignment, copies: Option<&[Obj]>) -> Self {
        let k = s.0.len();
        let mut a = FoAssignment::new(k);
        for (i, o) in s.0.iter().enumerate() {
            a.slots[i] = Some(*o);
        }
        if let Some(c) = copies {
            for (i, o) in c.iter().enumerate().take(k) {
                a.slots[k + i] = Some(*o);
            }
        }
        a
    }

    pub fn set(&mut self, v: FoVar, o: Obj) {
        let k = self.slots.len() / 2;
        self.slots[v.slot(k)] = Some(o);
    }

    pub fn get(&self, v: FoVar) -> Option<Obj> {
        let k = self.slots.len() / 2;
        self.slots.get(v.slot(k)).copied().flatten()
    }
}

struct Evaluator<'a> {
    s: &'a FoStructure,
    k: usize,
    memo: BTreeMap<(*const FoFormula, Vec<Option<Obj>>), bool>,
    free: BTreeMap<*const FoFormula, Vec<usize>>,
}

impl Evaluator<'_> {
    fn free_slots(&mut self, f: &FoFormula) -> Vec<usize> {
        let key = f as *const FoFormula;
        if let Some(v) = self.free.get(&key) {
            return v.clone();
        }
        let v: Vec<usize> = f.free_vars().into_iter().map(|x| x.slot(self.k)).collect();
        self.free.insert(key, v.clone());
        v
    }

    fn eval(&mut self, f: &FoFormula, env: &mut Vec<Option<Obj>>) -> Result<bool> {
        let get = |env: &Vec<Option<Obj>>, v: &FoVar| {
            env[v.slot(self.k)].ok_or_else(|| Error::InvalidArgument(format!("unbound variable {v:?}")))
        };
        match f {
            FoFormula::Pred(p, xs) => {
                let t = xs.iter().map(|x| get(env, x)).collect::<Result<Vec<_>>>()?;
                Ok(self.s.interpretation[p.0].contains(&t))
            }
            FoFormula::Team(xs) => {
                let t = xs.iter().map(|x| get(env, x)).collect::<Result<Vec<_>>>()?;
                Ok(self.s.team.contains(&t))
            }
            FoFormula::Eq(a, b) => Ok(get(env, a)? == get(env, b)?),
            FoFormula::Not(g) => Ok(!self.eval(g, env)?),
            FoFormula::And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            FoFormula::Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            FoFormula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            FoFormula::Forall(vs, g) | FoFormula::Exists(vs, g) => {
                let univ = matches!(f, FoFormula::Forall(..));
                let free = self.free_slots(f);
                let key = (f as *const FoFormula, free.iter().map(|&i| env[i]).collect::<Vec<_>>());
                if let Some(&b) = self.memo.get(&key) {
                    return Ok(b);
                }
                let slots: Vec<usize> = vs.iter().map(|v| v.slot(self.k)).collect();
                let saved: Vec<Option<Obj>> = slots.iter().map(|&i| env[i]).collect();
                let n = self.s.domain.len();
                let mut result = univ;
                let mut idx = vec![0usize; slots.len()];
                let total = if slots.is_empty() { 1 } else { n.pow(slots.len() as u32) };
                for _ in 0..total {
                    for (j, &sl) in slots.iter().enumerate() {
                        env[sl] = Some(Obj(idx[j] as u32));
                    }
                    let b = self.eval(g, env)?;
                    if b != univ {
                        result = !univ;
                        break;
                    }
                    for d in idx.iter_mut() {
                        *d += 1;
                        if *d < n {
                            break;
                        }
                        *d = 0;
                    }
                }
                for (j, &sl) in slots.iter().enumerate() {
                    env[sl] = saved[j];
                }
                self.memo.insert(key, result);
                Ok(result)
            }
        }
    }
}

/// Tarskian truth of `φ` in `s` under `α`, by exhaustive quantifier expansion.
pub fn fo_eval(s: &FoStructure, alpha: &FoAssignment, f: &FoFormula) -> Result<bool> {
    let k = s.vocab.num_vars();
    if alpha.slots.len() != 2 * k {
        return Err(Error::InvalidArgument("assignment sized for a different vocabulary".into()));
    }
    let mut env = alpha.slots.clone();
    let mut ev = Evaluator {
        s,
        k,
        memo: BTreeMap::new(),
        free: BTreeMap::new(),
    };
    ev.eval(f, &mut env)
}

/// Free variables of `tr(φ)` as a subset of `V`, or `None` if some copy
/// occurs free.
pub fn free_original_vars(f: &FoFormula) -> Option<VarSet> {
    let mut out = VarSet::EMPTY;
    for v in f.free_vars() {
        match v {
            FoVar::Orig(x) => out.insert(x),
            FoVar::Copy(_) => return None,
        }
    }
    Some(out)
}
