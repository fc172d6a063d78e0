//! Ψ-types, type models and satisfiability by type elimination.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::syntax::{closure, ClosureSet, Formula, Vocabulary};
use crate::vars::{Var, VarSet};

/// Refuse satisfiability checks whose closure has more non-negated members.
pub const DEFAULT_POSITIVE_CAP: usize = 24;

/// A subset `Σ` of a closure set, as a bit set over member indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PsiType(pub BitSet);

impl PsiType {
    pub fn from_members(width: usize, members: impl IntoIterator<Item = usize>) -> Self {
        PsiType(BitSet::from_indices(width, members))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter()
    }

    /// `D^Σ_X = {y ∈ V_ψ | D_Xy ∈ Σ}`
    pub fn dep_closure(&self, psi: &ClosureSet, x: VarSet) -> VarSet {
        psi.relevant_vars()
            .iter()
            .filter(|&y| self.contains(psi.dep(x, y)))
            .collect()
    }

    /// `Σ ∼_X Δ`: both agree on every member whose free variables lie in `D^Σ_X`.
    pub fn sim(&self, other: &PsiType, psi: &ClosureSet, x: VarSet) -> bool {
        let d = self.dep_closure(psi, x);
        self.0.agrees_on(&other.0, psi.mask_within(d))
    }

    /// Obligations `(X, χ)` for each `𝔻_Xχ ∈ Ψ \ Σ`: some `Δ ∼_X Σ` must omit `χ`.
    pub fn requirements<'a>(&'a self, psi: &'a ClosureSet) -> impl Iterator<Item = (VarSet, usize)> + 'a {
        (0..psi.len()).filter_map(move |i| match psi.formula(i) {
            Formula::Quant(x, body) if !self.contains(i) => {
                Some((*x, psi.index_of(body).expect("closure is subformula-closed")))
            }
            _ => None,
        })
    }

    /// Check conditions (a)–(e), naming each failure.
    pub fn check(&self, psi: &ClosureSet) -> ValidationReport {
        let mut r = ValidationReport::new();
        if self.0.width() != psi.len() {
            r.violation("width", format!("bit set of width {} for {} members", self.0.width(), psi.len()));
            return r;
        }
        for i in 0..psi.len() {
            if let Some(n) = psi.neg(i) {
                if self.contains(i) == self.contains(n) {
                    r.violation("a", format!("exactly one of `{}` and its negation must hold", psi.show(i)));
                }
            }
            match psi.formula(i) {
                Formula::And(a, b) => {
                    let (a, b) = (psi.index_of(a).unwrap(), psi.index_of(b).unwrap());
                    if self.contains(i) != (self.contains(a) && self.contains(b)) {
                        r.violation("b", format!("conjunction `{}` disagrees with its conjuncts", psi.show(i)));
                    }
                }
                Formula::Quant(_, body) => {
                    if self.contains(i) && !self.contains(psi.index_of(body).unwrap()) {
                        r.violation("c", format!("`{}` holds but its body does not", psi.show(i)));
                    }
                }
                _ => {}
            }
        }
        let vars = psi.relevant_vars();
        for x in vars.subsets() {
            let dx = self.dep_closure(psi, x);
            if !x.is_subset(dx) {
                r.violation("d", format!("projection fails for {}", psi.vocab().show_set(x)));
            }
            for y in vars.subsets() {
                if y.is_subset(dx) && !self.dep_closure(psi, y).is_subset(dx) {
                    r.violation(
                        "e",
                        format!(
                            "transitivity fails for {} → {}",
                            psi.vocab().show_set(x),
                            psi.vocab().show_set(y)
                        ),
                    );
                }
            }
        }
        r
    }
}

/// True iff `Σ` satisfies conditions (a)–(e) over `Ψ`.
pub fn is_psi_type(sigma: &PsiType, psi: &ClosureSet) -> bool {
    sigma.check(psi).is_ok()
}

/// `D^Σ_X`
pub fn type_dep_closure(sigma: &PsiType, psi: &ClosureSet, x: VarSet) -> VarSet {
    sigma.dep_closure(psi, x)
}

/// `Σ ∼_X Δ`
pub fn type_sim(sigma: &PsiType, delta: &PsiType, psi: &ClosureSet, x: VarSet) -> bool {
    sigma.sim(delta, psi, x)
}

/// A family of Ψ-types over one closure set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeModel {
    closure: Arc<ClosureSet>,
    types: Vec<PsiType>,
}

impl TypeModel {
    pub fn new(closure: ClosureSet, types: Vec<PsiType>) -> Self {
        TypeModel {
            closure: Arc::new(closure),
            types,
        }
    }

    pub fn shared(closure: Arc<ClosureSet>, types: Vec<PsiType>) -> Self {
        TypeModel { closure, types }
    }

    pub fn closure(&self) -> &ClosureSet {
        &self.closure
    }

    pub fn closure_arc(&self) -> &Arc<ClosureSet> {
        &self.closure
    }

    pub fn types(&self) -> &[PsiType] {
        &self.types
    }

    pub fn position(&self, t: &PsiType) -> Option<usize> {
        self.types.iter().position(|u| u == t)
    }

    /// Witness and universal conditions, plus (a)–(e) for each member.
    pub fn validate(&self) -> ValidationReport {
        let psi = &*self.closure;
        let mut r = ValidationReport::new();
        if self.types.is_empty() {
            r.violation("nonempty", "a type model needs at least one type");
        }
        for (i, t) in self.types.iter().enumerate() {
            for issue in t.check(psi).issues {
                r.violation(
                    format!("type-{}", issue.condition),
                    format!("type {i}: {}", issue.detail),
                );
            }
        }
        if !r.is_ok() {
            return r;
        }
        for (i, t) in self.types.iter().enumerate() {
            for (x, chi) in t.requirements(psi) {
                let witnessed = self
                    .types
                    .iter()
                    .any(|d| !d.contains(chi) && t.sim(d, psi, x));
                if !witnessed {
                    r.violation(
                        "witness",
                        format!(
                            "type {i} omits `D{} {}` but no type ∼_{} to it omits `{}`",
                            psi.vocab().show_set(x),
                            psi.show(chi),
                            psi.vocab().show_set(x),
                            psi.show(chi)
                        ),
                    );
                }
            }
            for (j, d) in self.types.iter().enumerate().skip(i + 1) {
                if !t.sim(d, psi, VarSet::EMPTY) {
                    r.violation("universal", format!("types {i} and {j} are not ∼_∅-related"));
                }
            }
        }
        r
    }
}

/// All closure operators on the subsets of `vars`: extensive maps `f`
/// with `Y ⊆ f(X) ⇒ f(Y) ⊆ f(X)`, as tables indexed by `X.bits()`.
fn closure_operators(k: usize) -> Vec<Vec<VarSet>> {
    let n = 1usize << k;
    let full = VarSet::full(k);
    let mut out = Vec::new();
    let mut cur = vec![VarSet::EMPTY; n];
    fn go(i: usize, n: usize, full: VarSet, cur: &mut Vec<VarSet>, out: &mut Vec<Vec<VarSet>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        let x = VarSet::from_bits(i as u32);
        for extra in full.difference(x).subsets() {
            let fx = x.union(extra);
            let ok = (0..i).all(|j| {
                let y = VarSet::from_bits(j as u32);
                (!y.is_subset(fx) || cur[j].is_subset(fx)) && (!x.is_subset(cur[j]) || fx.is_subset(cur[j]))
            });
            if ok {
                cur[i] = fx;
                go(i + 1, n, full, cur, out);
            }
        }
    }
    go(0, n, full, &mut cur, &mut out);
    out
}

/// Every Ψ-type, in a deterministic order.
pub fn enumerate_types(psi: &ClosureSet, cap: usize) -> Result<Vec<PsiType>> {
    let positives = psi.positive_count();
    if positives > cap {
        return Err(Error::ResourceCap(format!(
            "closure has {positives} non-negated members (cap {cap})"
        )));
    }
    let k = psi.num_vars();
    let free: Vec<usize> = (0..psi.len())
        .filter(|&i| matches!(psi.formula(i), Formula::Atom(..) | Formula::Quant(..)))
        .collect();
    let mut out = Vec::new();
    let mut mem = vec![false; psi.len()];
    for op in closure_operators(k) {
        for combo in 0..(1u64 << free.len()) {
            for (bit, &i) in free.iter().enumerate() {
                mem[i] = combo >> bit & 1 == 1;
            }
            let mut ok = true;
            for i in 0..psi.len() {
                match psi.formula(i) {
                    Formula::Dep(x, y) => mem[i] = op[x.bits() as usize].contains(*y),
                    Formula::Not(g) => mem[i] = !mem[psi.index_of(g).unwrap()],
                    Formula::And(a, b) => {
                        mem[i] = mem[psi.index_of(a).unwrap()] && mem[psi.index_of(b).unwrap()]
                    }
                    Formula::Quant(_, body) => {
                        if mem[i] && !mem[psi.index_of(body).unwrap()] {
                            ok = false;
                            break;
                        }
                    }
                    _ => {}
                }
            }
            if ok {
                out.push(PsiType::from_members(
                    psi.len(),
                    (0..psi.len()).filter(|&i| mem[i]),
                ));
            }
        }
    }
    Ok(out)
}

/// Greatest-fixpoint elimination inside each `∼_∅` class; returns the
/// surviving types.
pub fn eliminate(psi: &ClosureSet, candidates: &[PsiType]) -> Vec<PsiType> {
    let mut classes: BTreeMap<BitSet, Vec<usize>> = BTreeMap::new();
    for (i, t) in candidates.iter().enumerate() {
        let d = t.dep_closure(psi, VarSet::EMPTY);
        classes
            .entry(t.0.intersection(psi.mask_within(d)))
            .or_default()
            .push(i);
    }
    let mut alive = vec![false; candidates.len()];
    for members in classes.values() {
        for &i in members {
            alive[i] = true;
        }
        loop {
            let mut changed = false;
            for &i in members {
                if !alive[i] {
                    continue;
                }
                let t = &candidates[i];
                let ok = t.requirements(psi).all(|(x, chi)| {
                    members.iter().any(|&j| {
                        alive[j] && !candidates[j].contains(chi) && t.sim(&candidates[j], psi, x)
                    })
                });
                if !ok {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    candidates
        .iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(t, _)| t.clone())
        .collect()
}

/// Outcome of a satisfiability check.
#[derive(Debug, Clone)]
pub enum SatResult {
    /// A type model together with the index of a type containing the seed.
    Sat { model: TypeModel, root: usize },
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat { .. })
    }
}

/// Decide satisfiability of a core formula by type elimination.
pub fn satisfiable(psi: &Formula, vocab: &Vocabulary) -> Result<SatResult> {
    satisfiable_with_cap(psi, vocab, DEFAULT_POSITIVE_CAP)
}

pub fn satisfiable_with_cap(psi: &Formula, vocab: &Vocabulary, cap: usize) -> Result<SatResult> {
    let cl = closure(psi, vocab)?;
    let candidates = enumerate_types(&cl, cap)?;
    let survivors = eliminate(&cl, &candidates);
    let origin = cl.origin();
    let Some(root) = survivors.iter().position(|t| t.contains(origin)) else {
        return Ok(SatResult::Unsat);
    };
    let chosen = witness_closure(&cl, &survivors, root);
    Ok(SatResult::Sat {
        model: TypeModel::new(cl, chosen),
        root: 0,
    })
}

/// A small type model around `survivors[root]`: add witnesses greedily,
/// reusing types already chosen.
fn witness_closure(psi: &ClosureSet, survivors: &[PsiType], root: usize) -> Vec<PsiType> {
    let class_of = |t: &PsiType| t.0.intersection(psi.mask_within(t.dep_closure(psi, VarSet::EMPTY)));
    let class = class_of(&survivors[root]);
    let pool: Vec<&PsiType> = survivors.iter().filter(|t| class_of(t) == class).collect();
    let mut chosen = vec![survivors[root].clone()];
    let mut next = 0;
    while next < chosen.len() {
        let t = chosen[next].clone();
        for (x, chi) in t.requirements(psi) {
            let fits = |d: &PsiType| !d.contains(chi) && t.sim(d, psi, x);
            if chosen.iter().any(fits) {
                continue;
            }
            let w = pool
                .iter()
                .find(|d| fits(d))
                .expect("elimination leaves every requirement witnessed");
            chosen.push((*w).clone());
        }
        next += 1;
    }
    chosen
}

/// Index into `Ψ` of `D_Xy` given in local variables; convenience for tests.
pub fn dep_index(psi: &ClosureSet, x: VarSet, y: Var) -> usize {
    psi.dep(x, y)
}
