//! Bisimulation checkers by greatest-fixpoint refinement.
//!
//! Three notions are supported: dependence bisimulation (atomic harmony on
//! predicate atoms, back-and-forth on agreement sets, dependence-closedness
//! of maximal agreement sets), the variant that instead puts every
//! dependence atom into atomic harmony (`Gp`), and inclusion bisimulation,
//! where value coincidences across variables must also be matched.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::semantics::{Assignment, DependenceModel};
use crate::syntax::{Formula, Vocabulary};
use crate::vars::{Var, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BisimKind {
    Dependence,
    Gp,
    Inclusion,
}

impl BisimKind {
    pub fn name(self) -> &'static str {
        match self {
            BisimKind::Dependence => "dependence",
            BisimKind::Gp => "gp",
            BisimKind::Inclusion => "inclusion",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BisimOptions {
    /// Extend atomic harmony to equality atoms `x = y`.
    pub eq_atoms: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BisimStats {
    /// Distinct `D^s_X` computations, counted once per state and set.
    pub closure_computations: usize,
    /// Atomic formulas evaluated for atomic harmony.
    pub eval_calls: usize,
    pub rounds: usize,
    pub initial_pairs: usize,
}

/// The largest relation of a given kind found by refinement; empty when
/// no bisimulation exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimRelation {
    pub kind: BisimKind,
    pub pairs: BTreeSet<(usize, usize)>,
    pub stats: BisimStats,
}

impl BisimRelation {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn into_option(self) -> Option<BisimRelation> {
        if self.pairs.is_empty() {
            None
        } else {
            Some(self)
        }
    }

    /// Every team member on either side occurs in some pair.
    pub fn is_total(&self, left: usize, right: usize) -> bool {
        let l: BTreeSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        let r: BTreeSet<usize> = self.pairs.iter().map(|p| p.1).collect();
        l.len() == left && r.len() == right
    }
}

/// Memoized `D^s_X` for one model, counting each distinct computation.
struct Closures<'a> {
    m: &'a DependenceModel,
    cache: BTreeMap<(usize, VarSet), VarSet>,
}

impl<'a> Closures<'a> {
    fn new(m: &'a DependenceModel) -> Self {
        Closures {
            m,
            cache: BTreeMap::new(),
        }
    }

    fn get(&mut self, s: usize, x: VarSet) -> VarSet {
        let m = self.m;
        *self
            .cache
            .entry((s, x))
            .or_insert_with(|| m.dependence_closure_at(s, x))
    }

    fn count(&self) -> usize {
        self.cache.len()
    }
}

/// Predicate atoms `P𝐱` over all variable tuples, optionally with `x = y`.
pub fn atomic_formulas(vocab: &Vocabulary, eq_atoms: bool) -> Vec<Formula> {
    let k = vocab.num_vars();
    let mut out = Vec::new();
    for p in vocab.preds() {
        let ar = vocab.arity(p);
        let total = k.checked_pow(ar as u32).unwrap_or(usize::MAX);
        for code in 0..total {
            let mut c = code;
            let args: Vec<Var> = (0..ar)
                .map(|_| {
                    let v = Var(c % k);
                    c /= k;
                    v
                })
                .collect();
            out.push(Formula::Atom(p, args));
        }
    }
    if eq_atoms {
        for x in 0..k {
            for y in x + 1..k {
                out.push(Formula::Eq(Var(x), Var(y)));
            }
        }
    }
    out
}

fn signatures(m: &DependenceModel, atoms: &[Formula], stats: &mut BisimStats) -> Result<Vec<Vec<bool>>> {
    let tables = m.tables(atoms)?;
    stats.eval_calls += atoms.len() * m.team.len();
    Ok((0..m.team.len())
        .map(|s| tables.iter().map(|t| t[s]).collect())
        .collect())
}

/// `{(x,y) | s(x) = t(y)}` as a bit matrix.
fn coincidences(s: &Assignment, t: &Assignment, k: usize) -> u64 {
    let mut bits = 0u64;
    for x in 0..k {
        for y in 0..k {
            if s.get(Var(x)) == t.get(Var(y)) {
                bits |= 1 << (x * k + y);
            }
        }
    }
    bits
}

fn check_vocab(m: &DependenceModel, m2: &DependenceModel) -> Result<()> {
    if m.vocab != m2.vocab {
        return Err(Error::VocabularyMismatch(
            "bisimulation checking needs both models over the same vocabulary".into(),
        ));
    }
    if m.team.is_empty() || m2.team.is_empty() {
        return Err(Error::EmptyTeam);
    }
    Ok(())
}

struct Sides<'a> {
    m: [&'a DependenceModel; 2],
    closures: [Closures<'a>; 2],
    kind: BisimKind,
    k: usize,
}

impl Sides<'_> {
    /// Forth from side `a` (pair `(s, s2)`, `s` in side `a`), against `z`
    /// given as a predicate on `(side a index, side b index)`.
    fn step(&mut self, a: usize, s: usize, s2: usize, related: &dyn Fn(usize, usize) -> bool) -> bool {
        let b = 1 - a;
        let (ma, mb) = (self.m[a], self.m[b]);
        let sa = &ma.team[s];
        let sb = &mb.team[s2];
        for (t, ta) in ma.team.iter().enumerate() {
            let agree = sa.agreement_set(ta);
            if self.kind == BisimKind::Dependence && self.closures[b].get(s2, agree) != agree {
                return false;
            }
            let co = coincidences(sa, ta, self.k);
            let found = mb.team.iter().enumerate().any(|(t2, tb)| {
                related(t, t2)
                    && match self.kind {
                        BisimKind::Inclusion => co & !coincidences(sb, tb, self.k) == 0,
                        _ => agree.is_subset(sb.agreement_set(tb)),
                    }
            });
            if !found {
                return false;
            }
        }
        true
    }
}

/// Refine from the atomic-harmony pairs down to the largest bisimulation of
/// the given kind (possibly empty).
pub fn refine(m: &DependenceModel, m2: &DependenceModel, kind: BisimKind, opts: BisimOptions) -> Result<BisimRelation> {
    check_vocab(m, m2)?;
    let mut stats = BisimStats::default();
    let atoms = atomic_formulas(&m.vocab, opts.eq_atoms);
    let sig1 = signatures(m, &atoms, &mut stats)?;
    let sig2 = signatures(m2, &atoms, &mut stats)?;
    let k = m.vocab.num_vars();
    let mut sides = Sides {
        m: [m, m2],
        closures: [Closures::new(m), Closures::new(m2)],
        kind,
        k,
    };
    let mut pairs = BTreeSet::new();
    for s in 0..m.team.len() {
        for s2 in 0..m2.team.len() {
            if sig1[s] != sig2[s2] {
                continue;
            }
            if kind == BisimKind::Gp {
                let all = m.vocab.all_vars();
                // every dependence atom is part of atomic harmony
                let mut same = true;
                for x in all.subsets() {
                    same &= sides.closures[0].get(s, x) == sides.closures[1].get(s2, x);
                }
                if !same {
                    continue;
                }
            }
            pairs.insert((s, s2));
        }
    }
    stats.initial_pairs = pairs.len();
    loop {
        stats.rounds += 1;
        let snapshot = pairs.clone();
        let mut dead = Vec::new();
        for &(s, s2) in &snapshot {
            let forth = sides.step(0, s, s2, &|t, t2| snapshot.contains(&(t, t2)));
            let ok = forth && sides.step(1, s2, s, &|t2, t| snapshot.contains(&(t, t2)));
            if !ok {
                dead.push((s, s2));
            }
        }
        if dead.is_empty() {
            break;
        }
        for p in dead {
            pairs.remove(&p);
        }
    }
    stats.closure_computations = sides.closures[0].count() + sides.closures[1].count();
    Ok(BisimRelation { kind, pairs, stats })
}

pub fn check_dependence_bisim(m: &DependenceModel, m2: &DependenceModel) -> Result<Option<BisimRelation>> {
    Ok(refine(m, m2, BisimKind::Dependence, BisimOptions::default())?.into_option())
}

pub fn check_gp_bisim(m: &DependenceModel, m2: &DependenceModel) -> Result<Option<BisimRelation>> {
    Ok(refine(m, m2, BisimKind::Gp, BisimOptions::default())?.into_option())
}

pub fn check_inclusion_bisim(m: &DependenceModel, m2: &DependenceModel) -> Result<Option<BisimRelation>> {
    Ok(refine(m, m2, BisimKind::Inclusion, BisimOptions::default())?.into_option())
}

/// Clause-by-clause check of a candidate relation.
pub fn verify_bisimulation(
    m: &DependenceModel,
    m2: &DependenceModel,
    z: &BTreeSet<(usize, usize)>,
    kind: BisimKind,
    opts: BisimOptions,
) -> ValidationReport {
    let mut r = ValidationReport::new();
    if let Err(e) = check_vocab(m, m2) {
        r.violation("vocabulary", format!("{e}"));
        return r;
    }
    if z.is_empty() {
        r.violation("nonempty", "the relation is empty");
        return r;
    }
    for &(s, s2) in z {
        if s >= m.team.len() || s2 >= m2.team.len() {
            r.violation("range", format!("pair (s{}, s{}) is outside the teams", s + 1, s2 + 1));
            return r;
        }
    }
    let mut stats = BisimStats::default();
    let atoms = atomic_formulas(&m.vocab, opts.eq_atoms);
    let (Ok(sig1), Ok(sig2)) = (signatures(m, &atoms, &mut stats), signatures(m2, &atoms, &mut stats)) else {
        r.violation("vocabulary", "atoms could not be evaluated");
        return r;
    };
    let k = m.vocab.num_vars();
    let mut sides = Sides {
        m: [m, m2],
        closures: [Closures::new(m), Closures::new(m2)],
        kind,
        k,
    };
    for &(s, s2) in z {
        let pair = format!("(s{}, s{})", s + 1, s2 + 1);
        if sig1[s] != sig2[s2] {
            let i = (0..atoms.len()).find(|&i| sig1[s][i] != sig2[s2][i]).unwrap();
            r.violation("AH", format!("{pair} disagree on `{}`", atoms[i].display(&m.vocab)));
        }
        if kind == BisimKind::Gp {
            for x in m.vocab.all_vars().subsets() {
                if sides.closures[0].get(s, x) != sides.closures[1].get(s2, x) {
                    r.violation(
                        "AH",
                        format!("{pair} disagree on dependence atoms D_{}", m.vocab.show_set(x)),
                    );
                }
            }
        }
        for (a, name) in [(0usize, "Forth"), (1, "Back")] {
            let (u, u2) = if a == 0 { (s, s2) } else { (s2, s) };
            let (ma, mb) = (sides.m[a], sides.m[1 - a]);
            for (t, ta) in ma.team.iter().enumerate() {
                let sa = &ma.team[u];
                let agree = sa.agreement_set(ta);
                if kind == BisimKind::Dependence && sides.closures[1 - a].get(u2, agree) != agree {
                    r.violation(
                        name,
                        format!(
                            "{pair}: agreement set {} with t{} is not dependence-closed",
                            m.vocab.show_set(agree),
                            t + 1
                        ),
                    );
                }
                let sb = &mb.team[u2];
                let co = coincidences(sa, ta, k);
                let found = mb.team.iter().enumerate().any(|(t2, tb)| {
                    let rel = if a == 0 { z.contains(&(t, t2)) } else { z.contains(&(t2, t)) };
                    rel && match kind {
                        BisimKind::Inclusion => co & !coincidences(sb, tb, k) == 0,
                        _ => agree.is_subset(sb.agreement_set(tb)),
                    }
                });
                if !found {
                    r.violation(name, format!("{pair}: no match for t{}", t + 1));
                }
            }
        }
    }
    let rel = BisimRelation {
        kind,
        pairs: z.clone(),
        stats,
    };
    if kind == BisimKind::Dependence && !rel.is_total(m.team.len(), m2.team.len()) {
        r.warning("totality", "dependence bisimulations are total but this relation is not");
    }
    r
}

/// Compare truth values of `formulas` across every related pair.
pub fn invariance_probe(
    m: &DependenceModel,
    m2: &DependenceModel,
    z: &BTreeSet<(usize, usize)>,
    formulas: &[Formula],
) -> ValidationReport {
    let mut r = ValidationReport::new();
    let (t1, t2) = match (m.tables(formulas), m2.tables(formulas)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            r.violation("vocabulary", format!("{e}"));
            return r;
        }
    };
    for &(s, s2) in z {
        for (i, f) in formulas.iter().enumerate() {
            if t1[i][s] != t2[i][s2] {
                r.violation(
                    "invariance",
                    format!("(s{}, s{}) disagree on `{}`", s + 1, s2 + 1, f.display(&m.vocab)),
                );
            }
        }
    }
    r
}

/// All inclusion atoms `𝐱 ∈ 𝐲` with tuples of length at most `max_len`.
pub fn inclusion_atoms(vocab: &Vocabulary, max_len: usize) -> Vec<Formula> {
    let k = vocab.num_vars();
    let mut tuples: Vec<Vec<Var>> = Vec::new();
    let mut layer: Vec<Vec<Var>> = alloc::vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|t| {
                (0..k).map(move |v| {
                    let mut u = t.clone();
                    u.push(Var(v));
                    u
                })
            })
            .collect();
        tuples.extend(layer.iter().cloned());
    }
    let mut out = Vec::new();
    for xs in &tuples {
        for ys in &tuples {
            if xs.len() == ys.len() {
                out.push(Formula::Incl(xs.clone(), ys.clone()));
            }
        }
    }
    out
}
