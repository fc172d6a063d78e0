//! Dependence models and the local model checker.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::syntax::{ClosureSet, Formula, PredId, Vocabulary};
use crate::types::{PsiType, TypeModel};
use crate::vars::{Var, VarSet};

/// An object of the domain, by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj(pub u32);

impl Obj {
    /// Placeholder for a variable an assignment leaves undefined.
    pub const UNDEF: Obj = Obj(u32::MAX);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A variable assignment, indexed by variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub Vec<Obj>);

impl Assignment {
    pub fn get(&self, v: Var) -> Obj {
        self.0.get(v.0).copied().unwrap_or(Obj::UNDEF)
    }

    /// `s =_X t`
    pub fn agrees(&self, other: &Assignment, x: VarSet) -> bool {
        x.iter().all(|v| self.get(v) == other.get(v))
    }

    /// The maximal set `{v | s(v) = t(v)}`.
    pub fn agreement_set(&self, other: &Assignment) -> VarSet {
        (0..self.0.len().min(other.0.len()))
            .filter(|&i| self.0[i] == other.0[i])
            .map(Var)
            .collect()
    }

    pub fn project(&self, vars: &[Var]) -> Vec<Obj> {
        vars.iter().map(|v| self.get(*v)).collect()
    }

    pub fn project_set(&self, x: VarSet) -> Vec<Obj> {
        x.iter().map(|v| self.get(v)).collect()
    }
}

/// `s =_X t`
pub fn agrees(s: &Assignment, t: &Assignment, x: VarSet) -> bool {
    s.agrees(t, x)
}

/// A relational structure over `vocab` together with a team of assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceModel {
    pub vocab: Vocabulary,
    pub domain: Vec<String>,
    /// One relation per predicate of `vocab`, in declaration order.
    pub interpretation: Vec<BTreeSet<Vec<Obj>>>,
    pub team: Vec<Assignment>,
}

impl DependenceModel {
    /// Build a model, failing with the validation report if it is invalid.
    pub fn new(
        vocab: Vocabulary,
        domain: Vec<String>,
        interpretation: Vec<BTreeSet<Vec<Obj>>>,
        team: Vec<Assignment>,
    ) -> Result<Self> {
        let m = DependenceModel {
            vocab,
            domain,
            interpretation,
            team,
        };
        let report = m.validate();
        if !report.is_ok() {
            return Err(Error::InvalidModel(report.to_string()));
        }
        Ok(m)
    }

    pub fn object_name(&self, o: Obj) -> String {
        match self.domain.get(o.index()) {
            Some(n) => n.clone(),
            None if o == Obj::UNDEF => "undefined".into(),
            None => format!("#{}", o.0),
        }
    }

    pub fn object(&self, name: &str) -> Option<Obj> {
        self.domain
            .iter()
            .position(|n| n == name)
            .map(|i| Obj(i as u32))
    }

    pub fn show_assignment(&self, s: &Assignment) -> String {
        let mut out = String::from("{");
        for v in self.vocab.vars() {
            if v.0 > 0 {
                out.push_str(", ");
            }
            out.push_str(self.vocab.var_name(v));
            out.push_str(": ");
            out.push_str(&self.object_name(s.get(v)));
        }
        out.push('}');
        out
    }

    /// Every violated well-formedness condition.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let n = self.domain.len();
        let mut seen = BTreeSet::new();
        for name in &self.domain {
            if !seen.insert(name) {
                r.violation("domain", format!("object `{name}` is listed twice"));
            }
        }
        if self.interpretation.len() != self.vocab.num_preds() {
            r.violation(
                "interpretation",
                format!(
                    "{} relations given for {} predicates",
                    self.interpretation.len(),
                    self.vocab.num_preds()
                ),
            );
        }
        for (p, rel) in self.vocab.preds().zip(&self.interpretation) {
            let name = self.vocab.pred_name(p);
            for tuple in rel {
                if tuple.len() != self.vocab.arity(p) {
                    r.violation(
                        "arity",
                        format!(
                            "tuple of length {} in `{name}` of arity {}",
                            tuple.len(),
                            self.vocab.arity(p)
                        ),
                    );
                }
                for o in tuple {
                    if o.index() >= n {
                        r.violation(
                            "domain",
                            format!("`{name}` holds of object {} outside the domain", self.object_name(*o)),
                        );
                    }
                }
            }
        }
        if self.team.is_empty() {
            r.violation("team", "the team is empty");
        }
        let mut members = BTreeSet::new();
        for (i, s) in self.team.iter().enumerate() {
            for v in self.vocab.vars() {
                let o = s.get(v);
                if o == Obj::UNDEF {
                    r.violation(
                        "totality",
                        format!("assignment s{} has no value for `{}`", i + 1, self.vocab.var_name(v)),
                    );
                } else if o.index() >= n {
                    r.violation(
                        "domain",
                        format!(
                            "assignment s{} maps `{}` outside the domain",
                            i + 1,
                            self.vocab.var_name(v)
                        ),
                    );
                }
            }
            if s.0.len() > self.vocab.num_vars() {
                r.violation("totality", format!("assignment s{} has extra values", i + 1));
            }
            if !members.insert(s) {
                r.warning("team", format!("assignment s{} is a duplicate", i + 1));
            }
        }
        r
    }

    /// No object is the value of two distinct variables anywhere in the team.
    pub fn is_distinguished(&self) -> bool {
        let mut owner: BTreeMap<Obj, Var> = BTreeMap::new();
        for s in &self.team {
            for v in self.vocab.vars() {
                if *owner.entry(s.get(v)).or_insert(v) != v {
                    return false;
                }
            }
        }
        true
    }

    /// The team is all of `O^V`.
    pub fn is_full(&self) -> bool {
        let distinct: BTreeSet<&Assignment> = self.team.iter().collect();
        let expected = (self.domain.len() as u128).checked_pow(self.vocab.num_vars() as u32);
        expected == Some(distinct.len() as u128)
    }

    pub fn holds(&self, p: PredId, tuple: &[Obj]) -> bool {
        self.interpretation[p.0].contains(tuple)
    }

    pub fn team_index(&self, s: &Assignment) -> Option<usize> {
        self.team.iter().position(|t| t == s)
    }

    /// Truth value of `φ` at every team member, in team order.
    pub fn table(&self, f: &Formula) -> Result<Vec<bool>> {
        f.check(&self.vocab)?;
        if self.team.is_empty() {
            return Err(Error::EmptyTeam);
        }
        Ok(self.table_memo(f, &mut BTreeMap::new()))
    }

    /// Truth tables for several formulas sharing one memo table.
    pub fn tables<'a>(&self, fs: impl IntoIterator<Item = &'a Formula>) -> Result<Vec<Vec<bool>>> {
        if self.team.is_empty() {
            return Err(Error::EmptyTeam);
        }
        let mut memo = BTreeMap::new();
        fs.into_iter()
            .map(|f| {
                f.check(&self.vocab)?;
                Ok(self.table_memo(f, &mut memo))
            })
            .collect()
    }

    fn table_memo(&self, f: &Formula, memo: &mut BTreeMap<Formula, Vec<bool>>) -> Vec<bool> {
        if let Some(t) = memo.get(f) {
            return t.clone();
        }
        let team = &self.team;
        let t: Vec<bool> = match f {
            Formula::Atom(p, args) => team
                .iter()
                .map(|s| self.holds(*p, &s.project(args)))
                .collect(),
            Formula::Eq(x, y) => team.iter().map(|s| s.get(*x) == s.get(*y)).collect(),
            Formula::Incl(xs, ys) => {
                let targets: BTreeSet<Vec<Obj>> = team.iter().map(|t| t.project(ys)).collect();
                team.iter().map(|s| targets.contains(&s.project(xs))).collect()
            }
            Formula::Not(g) => self.table_memo(g, memo).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let ta = self.table_memo(a, memo);
                let tb = self.table_memo(b, memo);
                ta.into_iter().zip(tb).map(|(a, b)| a && b).collect()
            }
            Formula::Quant(x, g) => {
                let tg = self.table_memo(g, memo);
                let mut all: BTreeMap<Vec<Obj>, bool> = BTreeMap::new();
                for (s, v) in team.iter().zip(&tg) {
                    *all.entry(s.project_set(*x)).or_insert(true) &= *v;
                }
                team.iter().map(|s| all[&s.project_set(*x)]).collect()
            }
            Formula::Dep(x, y) => {
                let mut values: BTreeMap<Vec<Obj>, (Obj, bool)> = BTreeMap::new();
                for s in team {
                    let e = values.entry(s.project_set(*x)).or_insert((s.get(*y), true));
                    if e.0 != s.get(*y) {
                        e.1 = false;
                    }
                }
                team.iter().map(|s| values[&s.project_set(*x)].1).collect()
            }
        };
        memo.insert(f.clone(), t.clone());
        t
    }

    /// Truth of `φ` at team member `s` (an index into the team).
    pub fn eval(&self, s: usize, f: &Formula) -> Result<bool> {
        if s >= self.team.len() {
            return Err(Error::AssignmentNotInTeam);
        }
        Ok(self.table(f)?[s])
    }

    /// Truth of `φ` at an assignment, which must belong to the team.
    pub fn eval_assignment(&self, s: &Assignment, f: &Formula) -> Result<bool> {
        let i = self.team_index(s).ok_or(Error::AssignmentNotInTeam)?;
        self.eval(i, f)
    }

    /// `D^s_X = {y | s ⊨ D_Xy}`, the intersection of the agreement sets of
    /// `s` with every `t =_X s`.
    pub fn dependence_closure_at(&self, s: usize, x: VarSet) -> VarSet {
        let s = &self.team[s];
        let mut d = self.vocab.all_vars();
        for t in &self.team {
            if s.agrees(t, x) {
                d = d.intersection(s.agreement_set(t));
            }
        }
        d
    }

    /// Truth tables of every member of `Ψ`, which must be expressible in
    /// this model's vocabulary.
    pub fn closure_tables(&self, psi: &ClosureSet) -> Result<Vec<Vec<bool>>> {
        let fs = (0..psi.len())
            .map(|i| psi.formula_in(i, &self.vocab))
            .collect::<Result<Vec<_>>>()?;
        self.tables(&fs)
    }

    /// `type_Ψ(s)`
    pub fn extract_type(&self, s: usize, psi: &ClosureSet) -> Result<PsiType> {
        if s >= self.team.len() {
            return Err(Error::AssignmentNotInTeam);
        }
        let tables = self.closure_tables(psi)?;
        Ok(PsiType::from_members(
            psi.len(),
            (0..psi.len()).filter(|&i| tables[i][s]),
        ))
    }

    /// Ψ-types of every team member, in team order.
    pub fn types(&self, psi: &ClosureSet) -> Result<Vec<PsiType>> {
        let tables = self.closure_tables(psi)?;
        Ok((0..self.team.len())
            .map(|s| PsiType::from_members(psi.len(), (0..psi.len()).filter(|&i| tables[i][s])))
            .collect())
    }

    /// The deduplicated family `{type_Ψ(s) | s ∈ A}`.
    pub fn induced_type_model(&self, psi: &ClosureSet) -> Result<TypeModel> {
        let mut types = self.types(psi)?;
        types.sort();
        types.dedup();
        Ok(TypeModel::new(psi.clone(), types))
    }
}
