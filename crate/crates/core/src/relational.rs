//! Relational (modal) models of LFD: states with equivalence relations
//! `∼_X` and unary predicates `D_Xy`, `P𝐱`; histories through a finite
//! model; link structures and forbidden substructures.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::semantics::DependenceModel;
use crate::structure::{permutations, Relation, Structure};
use crate::syntax::{Formula, PredId, Vocabulary};
use crate::unravel::tuples;
use crate::vars::{Var, VarSet};

/// Subsets of `V` beyond which relations are not materialized.
const MAX_RELATIONAL_VARS: usize = 10;

/// `𝔸 = (A, ∼_X, D_Xy, P𝐱)`.
///
/// A subset `X` without a stored relation is read as the identity on
/// states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalModel {
    pub vocab: Vocabulary,
    pub states: Vec<String>,
    pub relations: BTreeMap<VarSet, BTreeSet<(usize, usize)>>,
    pub dep_atoms: BTreeMap<(VarSet, Var), BTreeSet<usize>>,
    pub pred_atoms: BTreeMap<(PredId, Vec<Var>), BTreeSet<usize>>,
}

impl RelationalModel {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `s ∼_X t`
    pub fn related(&self, x: VarSet, s: usize, t: usize) -> bool {
        match self.relations.get(&x) {
            Some(r) => r.contains(&(s, t)),
            None => s == t,
        }
    }

    /// `[s]_X` as a sorted list of states.
    pub fn class(&self, x: VarSet, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.related(x, s, t)).collect()
    }

    pub fn dep(&self, x: VarSet, y: Var, s: usize) -> bool {
        self.dep_atoms.get(&(x, y)).is_some_and(|set| set.contains(&s))
    }

    pub fn pred(&self, p: PredId, args: &[Var], s: usize) -> bool {
        self.pred_atoms
            .get(&(p, args.to_vec()))
            .is_some_and(|set| set.contains(&s))
    }

    /// `D^s_X = {y | D_Xy(s)}`
    pub fn dep_closure(&self, x: VarSet, s: usize) -> VarSet {
        self.vocab.vars().filter(|&y| self.dep(x, y, s)).collect()
    }

    /// `[s]_X ⊆ [s]_y`, the reading of `D_Xy` forced on standard models.
    pub fn class_dependence(&self, x: VarSet, y: Var, s: usize) -> bool {
        (0..self.len()).all(|t| !self.related(x, s, t) || self.related(VarSet::singleton(y), s, t))
    }

    pub fn dep_name(&self, x: VarSet, y: Var) -> String {
        format!("D({},{})", self.vocab.show_set(x), self.vocab.var_name(y))
    }

    pub fn pred_name(&self, p: PredId, args: &[Var]) -> String {
        format!("{}({})", self.vocab.pred_name(p), self.vocab.show_tuple(args))
    }

    /// The first-order structure with a binary relation `~X` per stored
    /// `X` and a unary relation per atom.
    pub fn to_structure(&self) -> Structure {
        let mut relations = BTreeMap::new();
        for (x, r) in &self.relations {
            relations.insert(
                format!("~{}", self.vocab.show_set(*x)),
                Relation {
                    arity: 2,
                    tuples: r.iter().map(|&(s, t)| vec![s as u32, t as u32]).collect(),
                },
            );
        }
        for ((x, y), set) in &self.dep_atoms {
            relations.insert(
                self.dep_name(*x, *y),
                Relation {
                    arity: 1,
                    tuples: set.iter().map(|&s| vec![s as u32]).collect(),
                },
            );
        }
        for ((p, args), set) in &self.pred_atoms {
            relations.insert(
                self.pred_name(*p, args),
                Relation {
                    arity: 1,
                    tuples: set.iter().map(|&s| vec![s as u32]).collect(),
                },
            );
        }
        Structure {
            domain: self.states.clone(),
            relations,
        }
    }
}

fn guard_vars(vocab: &Vocabulary) -> Result<()> {
    if vocab.num_vars() > MAX_RELATIONAL_VARS {
        return Err(Error::ResourceCap(format!(
            "relational models are limited to {MAX_RELATIONAL_VARS} variables"
        )));
    }
    Ok(())
}

/// States are the team; `∼_X` is agreement on `X`; the atoms are read off
/// the model checker.
pub fn to_relational(m: &DependenceModel) -> Result<RelationalModel> {
    guard_vars(&m.vocab)?;
    let n = m.team.len();
    let all = m.vocab.all_vars();
    let mut relations = BTreeMap::new();
    for x in all.subsets() {
        let mut r = BTreeSet::new();
        for s in 0..n {
            for t in 0..n {
                if m.team[s].agrees(&m.team[t], x) {
                    r.insert((s, t));
                }
            }
        }
        relations.insert(x, r);
    }
    let mut dep_atoms: BTreeMap<(VarSet, Var), BTreeSet<usize>> = BTreeMap::new();
    for x in all.subsets() {
        for y in m.vocab.vars() {
            dep_atoms.insert((x, y), BTreeSet::new());
        }
        for s in 0..n {
            for y in m.dependence_closure_at(s, x).iter() {
                dep_atoms.get_mut(&(x, y)).unwrap().insert(s);
            }
        }
    }
    let mut pred_atoms = BTreeMap::new();
    for p in m.vocab.preds() {
        for args in tuples(m.vocab.num_vars(), m.vocab.arity(p)) {
            let set = (0..n)
                .filter(|&s| m.holds(p, &m.team[s].project(&args)))
                .collect();
            pred_atoms.insert((p, args), set);
        }
    }
    Ok(RelationalModel {
        vocab: m.vocab.clone(),
        states: (1..=n).map(|i| format!("s{i}")).collect(),
        relations,
        dep_atoms,
        pred_atoms,
    })
}

/// Conditions (1)–(5) of a general relational model, plus (6) and (7)
/// when `standard` is set.
pub fn validate_relational(r: &RelationalModel, standard: bool) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let n = r.len();
    if guard_vars(&r.vocab).is_err() {
        rep.violation("vocabulary", "too many variables");
        return rep;
    }
    let name = |s: usize| r.states[s].as_str();
    for (x, rel) in &r.relations {
        if rel.iter().any(|&(s, t)| s >= n || t >= n) {
            rep.violation("states", format!("∼{} mentions an unknown state", r.vocab.show_set(*x)));
            return rep;
        }
    }
    for set in r.dep_atoms.values().chain(r.pred_atoms.values()) {
        if set.iter().any(|&s| s >= n) {
            rep.violation("states", "an atom holds at an unknown state");
            return rep;
        }
    }
    let all = r.vocab.all_vars();
    let show = |x: VarSet| r.vocab.show_set(x);

    // (1)
    for x in all.subsets() {
        let label = show(x);
        if let Some(s) = (0..n).find(|&s| !r.related(x, s, s)) {
            rep.violation("1", format!("∼{label} is not reflexive at {}", name(s)));
            continue;
        }
        let rel = r.relations.get(&x).cloned().unwrap_or_default();
        if let Some(&(s, t)) = rel.iter().find(|&&(s, t)| !r.related(x, t, s)) {
            rep.violation("1", format!("∼{label} is not symmetric: {} ∼ {}", name(s), name(t)));
            continue;
        }
        'trans: for &(s, t) in &rel {
            for u in 0..n {
                if r.related(x, t, u) && !r.related(x, s, u) {
                    rep.violation(
                        "1",
                        format!("∼{label} is not transitive: {} ∼ {} ∼ {}", name(s), name(t), name(u)),
                    );
                    break 'trans;
                }
            }
        }
    }

    // (2): projection and transitivity of D^s
    for s in 0..n {
        for x in all.subsets() {
            let dx = r.dep_closure(x, s);
            if !x.is_subset(dx) {
                rep.violation("2", format!("projection fails for {} at {}", show(x), name(s)));
            }
            for y in all.subsets() {
                if y.is_subset(dx) && !r.dep_closure(y, s).is_subset(dx) {
                    rep.violation(
                        "2",
                        format!("transitivity fails for {} → {} at {}", show(x), show(y), name(s)),
                    );
                }
            }
        }
    }

    // (3)
    for ((x, y), set) in &r.dep_atoms {
        for &s in set {
            for t in 0..n {
                if !r.related(*x, s, t) {
                    continue;
                }
                if !r.related(VarSet::singleton(*y), s, t) {
                    rep.violation(
                        "3",
                        format!("{} at {} but {} ≁{} {}", r.dep_name(*x, *y), name(s), name(s), r.vocab.var_name(*y), name(t)),
                    );
                }
                if !set.contains(&t) {
                    rep.violation("3", format!("{} holds at {} but not at {}", r.dep_name(*x, *y), name(s), name(t)));
                }
            }
        }
    }

    // (4)
    for ((p, args), set) in &r.pred_atoms {
        let x: VarSet = args.iter().copied().collect();
        for &s in set {
            for t in 0..n {
                if r.related(x, s, t) && !set.contains(&t) {
                    rep.violation("4", format!("{} holds at {} but not at {}", r.pred_name(*p, args), name(s), name(t)));
                }
            }
        }
    }
    // larger X also carry the atom
    for ((p, args), set) in &r.pred_atoms {
        let base: VarSet = args.iter().copied().collect();
        for x in all.subsets().filter(|x| base.is_subset(*x) && *x != base) {
            for &s in set {
                if let Some(t) = (0..n).find(|&t| r.related(x, s, t) && !set.contains(&t)) {
                    rep.violation("4", format!("{} holds at {} but not at {}", r.pred_name(*p, args), name(s), name(t)));
                }
            }
        }
    }

    // (5)
    for s in 0..n {
        if let Some(t) = (0..n).find(|&t| !r.related(VarSet::EMPTY, s, t)) {
            rep.violation("5", format!("{} ≁∅ {}", name(s), name(t)));
            break;
        }
    }

    if standard {
        // (6)
        'six: for x in all.subsets() {
            for y in all.subsets() {
                for s in 0..n {
                    for t in 0..n {
                        if r.related(x, s, t) && r.related(y, s, t) && !r.related(x.union(y), s, t) {
                            rep.violation(
                                "6",
                                format!("{} ∼{} {} and ∼{} but not ∼{}", name(s), show(x), name(t), show(y), show(x.union(y))),
                            );
                            break 'six;
                        }
                    }
                }
            }
        }
        // (7)
        for x in all.subsets() {
            for y in r.vocab.vars() {
                for s in 0..n {
                    if r.class_dependence(x, y, s) && !r.dep(x, y, s) {
                        rep.violation("7", format!("[{}]{} ⊆ [{}]{} but {} fails", name(s), show(x), name(s), r.vocab.var_name(y), r.dep_name(x, y)));
                    }
                }
            }
        }
    }
    rep
}

/// Truth table of a core formula over all states.
pub fn modal_table(r: &RelationalModel, f: &Formula) -> Result<Vec<bool>> {
    let n = r.len();
    Ok(match f {
        Formula::Atom(p, args) => (0..n).map(|s| r.pred(*p, args, s)).collect(),
        Formula::Dep(x, y) => (0..n).map(|s| r.dep(*x, *y, s)).collect(),
        Formula::Eq(..) | Formula::Incl(..) => {
            return Err(Error::UnsupportedAtom("relational models interpret core formulas only".into()))
        }
        Formula::Not(g) => modal_table(r, g)?.into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let (ta, tb) = (modal_table(r, a)?, modal_table(r, b)?);
            ta.into_iter().zip(tb).map(|(a, b)| a && b).collect()
        }
        Formula::Quant(x, g) => {
            let tg = modal_table(r, g)?;
            (0..n)
                .map(|s| (0..n).all(|t| !r.related(*x, s, t) || tg[t]))
                .collect()
        }
    })
}

/// `s ⊨ φ` in the relational semantics.
pub fn modal_eval(r: &RelationalModel, s: usize, f: &Formula) -> Result<bool> {
    if s >= r.len() {
        return Err(Error::InvalidArgument(format!("no state with index {s}")));
    }
    f.check(&r.vocab)?;
    Ok(modal_table(r, f)?[s])
}

/// `h = (b0, X1, b1, …, Xn, bn)`, stored as a tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub parent: Option<usize>,
    pub label: VarSet,
    pub state: usize,
    pub len: usize,
}

/// All histories of bounded length through a general relational model,
/// with the one-step relations `∼¹_X`.
#[derive(Debug, Clone)]
pub struct HistoryModel {
    pub base: RelationalModel,
    pub histories: Vec<History>,
    pub one_step: BTreeMap<VarSet, BTreeSet<(usize, usize)>>,
}

pub fn build_histories(b: &RelationalModel, b0: usize, depth: usize) -> Result<HistoryModel> {
    if b0 >= b.len() {
        return Err(Error::InvalidArgument(format!("no state with index {b0}")));
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("history depth must be at least 1".into()));
    }
    let report = validate_relational(b, false);
    if !report.is_ok() {
        return Err(Error::InvalidArgument(format!("not a general relational model: {report}")));
    }
    let all = b.vocab.all_vars();
    let mut histories = vec![History {
        parent: None,
        label: VarSet::EMPTY,
        state: b0,
        len: 1,
    }];
    let mut one_step: BTreeMap<VarSet, BTreeSet<(usize, usize)>> = all.subsets().map(|x| (x, BTreeSet::new())).collect();
    let mut next = 0;
    while next < histories.len() {
        let h = histories[next].clone();
        if h.len < depth {
            for y in all.subsets() {
                let dy = b.dep_closure(y, h.state);
                for c in 0..b.len() {
                    if !b.related(y, h.state, c) {
                        continue;
                    }
                    let id = histories.len();
                    histories.push(History {
                        parent: Some(next),
                        label: y,
                        state: c,
                        len: h.len + 1,
                    });
                    // h ⊨ D_YX for every X ⊆ D^h_Y
                    for x in dy.subsets() {
                        let rel = one_step.get_mut(&x).unwrap();
                        rel.insert((next, id));
                        rel.insert((id, next));
                    }
                }
            }
        }
        next += 1;
    }
    Ok(HistoryModel {
        base: b.clone(),
        histories,
        one_step,
    })
}

impl HistoryModel {
    /// `lh(h) ≤ 3`
    pub fn in_cut(&self, h: usize) -> bool {
        self.histories[h].len <= 3
    }

    pub fn show_history(&self, h: usize) -> String {
        let mut steps = Vec::new();
        let mut cur = Some(h);
        while let Some(i) = cur {
            steps.push(i);
            cur = self.histories[i].parent;
        }
        steps.reverse();
        let mut s = String::from("(");
        for (k, i) in steps.into_iter().enumerate() {
            let node = &self.histories[i];
            if k > 0 {
                s.push_str(&format!(", {}, ", self.base.vocab.show_set(node.label)));
            }
            s.push_str(&self.base.states[node.state]);
        }
        s.push(')');
        s
    }

    /// `(A, ∼¹_X, D_Xy, P𝐱)` with atoms read from `last(h)`.
    pub fn one_step_model(&self) -> RelationalModel {
        let last = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            (0..self.histories.len())
                .filter(|&h| set.contains(&self.histories[h].state))
                .collect()
        };
        RelationalModel {
            vocab: self.base.vocab.clone(),
            states: (0..self.histories.len()).map(|h| self.show_history(h)).collect(),
            relations: self.one_step.clone(),
            dep_atoms: self.base.dep_atoms.iter().map(|(k, v)| (*k, last(v))).collect(),
            pred_atoms: self.base.pred_atoms.iter().map(|(k, v)| (k.clone(), last(v))).collect(),
        }
    }

    /// The one-step model restricted to histories of length at most 3.
    pub fn cut(&self) -> RelationalModel {
        let keep: Vec<usize> = (0..self.histories.len()).filter(|&h| self.in_cut(h)).collect();
        restrict_states(&self.one_step_model(), &keep)
    }
}

/// The submodel induced on `keep`, renumbered in the given order.
pub fn restrict_states(r: &RelationalModel, keep: &[usize]) -> RelationalModel {
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let map_set = |set: &BTreeSet<usize>| set.iter().filter_map(|s| pos.get(s).copied()).collect();
    RelationalModel {
        vocab: r.vocab.clone(),
        states: keep.iter().map(|&s| r.states[s].clone()).collect(),
        relations: r
            .relations
            .iter()
            .map(|(x, rel)| {
                (
                    *x,
                    rel.iter()
                        .filter_map(|(s, t)| Some((*pos.get(s)?, *pos.get(t)?)))
                        .collect(),
                )
            })
            .collect(),
        dep_atoms: r.dep_atoms.iter().map(|(k, v)| (*k, map_set(v))).collect(),
        pred_atoms: r.pred_atoms.iter().map(|(k, v)| (k.clone(), map_set(v))).collect(),
    }
}

/// Replace one-step relations by `∼ᵗʳ_X`: `s ∼ᵗʳ_X t` iff `s = t` or every
/// step of the unique shortest `∼¹_∅` path from `s` to `t` is a `∼¹_X`
/// step. Fails if the `∼¹_∅` graph is disconnected or some shortest path
/// is not unique.
pub fn transitive_closure_relations(one_step: &RelationalModel) -> Result<RelationalModel> {
    let n = one_step.len();
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in one_step.relations.get(&VarSet::EMPTY).into_iter().flatten() {
        if s != t {
            adj[s].push(t);
        }
    }
    for a in &mut adj {
        a.sort();
        a.dedup();
    }
    let all = one_step.vocab.all_vars();
    let mut relations: BTreeMap<VarSet, BTreeSet<(usize, usize)>> = all.subsets().map(|x| (x, BTreeSet::new())).collect();
    for s in 0..n {
        // breadth-first search counting shortest paths
        let mut dist = vec![usize::MAX; n];
        let mut count = vec![0usize; n];
        let mut pred = vec![usize::MAX; n];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        count[s] = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    pred[v] = u;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    count[v] = (count[v] + count[u]).min(2);
                }
            }
        }
        for t in 0..n {
            if dist[t] == usize::MAX {
                return Err(Error::InvalidModel(format!(
                    "{} and {} are not connected by ∼¹∅",
                    one_step.states[s], one_step.states[t]
                )));
            }
            if count[t] > 1 {
                return Err(Error::InvalidModel(format!(
                    "more than one shortest ∼¹∅ path from {} to {}",
                    one_step.states[s], one_step.states[t]
                )));
            }
            let mut steps = Vec::new();
            let mut v = t;
            while v != s {
                steps.push((pred[v], v));
                v = pred[v];
            }
            for x in all.subsets() {
                if steps.iter().all(|&(a, b)| one_step.related(x, a, b)) {
                    relations.get_mut(&x).unwrap().insert((s, t));
                }
            }
        }
    }
    Ok(RelationalModel {
        relations,
        ..one_step.clone()
    })
}

/// `C_m`: `m` elements with `(cᵢ, cⱼ)` in `relation` for all `i ≠ j`.
pub fn cycle_structure(m: usize, relation: &str) -> Structure {
    let mut tuples = BTreeSet::new();
    for i in 0..m as u32 {
        for j in 0..m as u32 {
            if i != j {
                tuples.insert(vec![i, j]);
            }
        }
    }
    let mut relations = BTreeMap::new();
    relations.insert(String::from(relation), Relation { arity: 2, tuples });
    Structure {
        domain: (1..=m).map(|i| format!("c{i}")).collect(),
        relations,
    }
}

/// A homomorphism `f → s` (relations matched by name), by backtracking.
pub fn find_homomorphism(f: &Structure, s: &Structure) -> Option<Vec<u32>> {
    fn go(i: usize, f: &Structure, s: &Structure, img: &mut Vec<u32>) -> bool {
        // every tuple whose elements are all assigned must be preserved
        for (name, rel) in &f.relations {
            let target = s.relations.get(name);
            for t in &rel.tuples {
                if t.iter().all(|&a| (a as usize) < i) {
                    let mapped: Vec<u32> = t.iter().map(|&a| img[a as usize]).collect();
                    if !target.is_some_and(|r| r.tuples.contains(&mapped)) {
                        return false;
                    }
                }
            }
        }
        if i == f.size() {
            return true;
        }
        for b in 0..s.size() as u32 {
            img.push(b);
            if go(i + 1, f, s, img) {
                return true;
            }
            img.pop();
        }
        false
    }
    let mut img = Vec::new();
    go(0, f, s, &mut img).then_some(img)
}

/// Isomorphic structures, by trying all bijections.
pub fn isomorphic(a: &Structure, b: &Structure) -> bool {
    if a.size() != b.size() || a.relations.keys().ne(b.relations.keys()) {
        return false;
    }
    permutations(a.size()).into_iter().any(|p| {
        a.relations.iter().all(|(name, r)| {
            let other = &b.relations[name];
            r.tuples.len() == other.tuples.len()
                && r.tuples
                    .iter()
                    .all(|t| other.tuples.contains(&t.iter().map(|&x| p.apply(x)).collect::<Vec<_>>()))
        })
    })
}

/// Substructures induced by the element set of a tuple, and by singletons.
pub fn link_substructures(s: &Structure) -> Vec<Structure> {
    let mut sets: BTreeSet<Vec<u32>> = (0..s.size() as u32).map(|a| vec![a]).collect();
    for t in s.live_tuples() {
        let mut e = t.clone();
        e.sort();
        e.dedup();
        sets.insert(e);
    }
    sets.into_iter().map(|e| s.induced(&e)).collect()
}

pub fn is_irreflexive(s: &Structure) -> bool {
    s.live_tuples().iter().all(|t| {
        let set: BTreeSet<&u32> = t.iter().collect();
        set.len() == t.len()
    })
}

/// Every two distinct elements occur together in some live tuple.
pub fn is_packed(s: &Structure) -> bool {
    let live = s.live_tuples();
    (0..s.size() as u32).all(|a| {
        (a + 1..s.size() as u32).all(|b| live.iter().any(|t| t.contains(&a) && t.contains(&b)))
    })
}

/// Link type against `links` (skipped when `None`), packedness,
/// irreflexivity and freeness from every member of `forbidden`.
pub fn check_link_packed_free(s: &Structure, links: Option<&[Structure]>, forbidden: &[Structure]) -> ValidationReport {
    let mut r = ValidationReport::new();
    if let Some(links) = links {
        for l in link_substructures(s) {
            if !links.iter().any(|k| isomorphic(&l, k)) {
                r.violation("link-type", format!("link on {{{}}} matches no allowed link", l.domain.join(",")));
            }
        }
    }
    if !is_packed(s) {
        r.violation("packed", "two elements share no live tuple");
    }
    if !is_irreflexive(s) {
        r.violation("irreflexive", "a live tuple repeats an element");
    }
    for f in forbidden {
        if let Some(h) = find_homomorphism(f, s) {
            let img: Vec<&str> = h.iter().map(|&b| s.domain[b as usize].as_str()).collect();
            r.violation("free", format!("a forbidden structure of size {} maps onto ({})", f.size(), img.join(",")));
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::tests::model_a;
    use crate::syntax::{closure, parse_formula};

    #[test]
    fn model_a_is_standard() {
        let m = model_a();
        let r = to_relational(&m).unwrap();
        assert!(validate_relational(&r, true).is_empty());
        let x = VarSet::singleton(Var(0));
        assert_eq!(r.class(x, 0), [0, 1]);
        assert_eq!(r.class(x, 2), [2]);
        assert_eq!(r.class(VarSet::EMPTY, 1), [0, 1, 2]);
    }

    #[test]
    fn modal_eval_matches_eval() {
        let m = model_a();
        let r = to_relational(&m).unwrap();
        let psi = closure(&parse_formula("dep({x},y)", &m.vocab).unwrap(), &m.vocab).unwrap();
        for f in psi.formulas() {
            for s in 0..m.team.len() {
                assert_eq!(modal_eval(&r, s, f).unwrap(), m.eval(s, f).unwrap());
            }
        }
    }

    #[test]
    fn validation_flags_conditions() {
        let m = model_a();
        let mut r = to_relational(&m).unwrap();
        let x = VarSet::singleton(Var(0));
        r.relations.get_mut(&x).unwrap().remove(&(1, 0));
        assert!(validate_relational(&r, false).fails("1"));

        let mut r = to_relational(&m).unwrap();
        r.dep_atoms.get_mut(&(x, Var(1))).unwrap().remove(&2);
        assert!(!validate_relational(&r, false).fails("7"));
        assert!(validate_relational(&r, true).fails("7"));

        let mut r = to_relational(&m).unwrap();
        r.relations.get_mut(&VarSet::EMPTY).unwrap().remove(&(0, 2));
        r.relations.get_mut(&VarSet::EMPTY).unwrap().remove(&(2, 0));
        assert!(validate_relational(&r, false).fails("5"));
    }

    /// Two states, `∼_x` the identity, `∼_∅` universal, `P(x)` at `b`.
    pub fn two_state() -> RelationalModel {
        let vocab = Vocabulary::from_names(&["x"], &[("P", 1)]);
        let x = VarSet::singleton(Var(0));
        RelationalModel {
            vocab,
            states: vec!["a".into(), "b".into()],
            relations: BTreeMap::from([
                (VarSet::EMPTY, BTreeSet::from([(0, 0), (0, 1), (1, 0), (1, 1)])),
                (x, BTreeSet::from([(0, 0), (1, 1)])),
            ]),
            dep_atoms: BTreeMap::from([((x, Var(0)), BTreeSet::from([0, 1])), ((VarSet::EMPTY, Var(0)), BTreeSet::new())]),
            pred_atoms: BTreeMap::from([((PredId(0), vec![Var(0)]), BTreeSet::from([1]))]),
        }
    }

    #[test]
    fn histories_and_closure_relations() {
        let b = two_state();
        assert!(validate_relational(&b, true).is_empty());
        let h1 = build_histories(&b, 0, 1).unwrap();
        assert_eq!(h1.histories.len(), 1);
        let h = build_histories(&b, 0, 3).unwrap();
        assert_eq!(h.histories.len(), 1 + 3 + 9);
        // every one-step extension is a ∼¹∅ edge
        for (i, node) in h.histories.iter().enumerate().skip(1) {
            assert!(h.one_step[&VarSet::EMPTY].contains(&(node.parent.unwrap(), i)));
        }
        let free = check_link_packed_free(&relation_only(&h.cut(), VarSet::EMPTY), None, &[cycle_structure(3, "~{}"), cycle_structure(4, "~{}")]);
        assert!(!free.fails("free"));
        let tr = transitive_closure_relations(&h.one_step_model()).unwrap();
        let r = validate_relational(&tr, true);
        assert!(r.is_empty(), "{r}");
    }

    #[test]
    fn closure_along_chains() {
        let b = two_state();
        let h = build_histories(&b, 0, 3).unwrap();
        let x = VarSet::singleton(Var(0));
        let tr = transitive_closure_relations(&h.one_step_model()).unwrap();
        // (a) → (a,{x},a) → (a,{x},a,{x},a)
        let c1 = (1..h.histories.len()).find(|&i| h.histories[i].parent == Some(0) && h.histories[i].label == x).unwrap();
        let c2 = (1..h.histories.len()).find(|&i| h.histories[i].parent == Some(c1) && h.histories[i].label == x).unwrap();
        assert!(tr.related(x, 0, c2));
        assert!((0..tr.len()).all(|s| tr.related(x, s, s)));
    }

    fn relation_only(r: &RelationalModel, x: VarSet) -> Structure {
        let mut s = r.to_structure();
        let name = format!("~{}", r.vocab.show_set(x));
        s.relations.retain(|k, _| *k == name);
        s
    }

    #[test]
    fn cycles_and_links() {
        let c3 = cycle_structure(3, "E");
        let two = cycle_structure(2, "E");
        let forbidden: Vec<Structure> = (3..=5).map(|m| cycle_structure(m, "E")).collect();
        assert!(check_link_packed_free(&c3, None, &forbidden).fails("free"));
        assert!(check_link_packed_free(&two, None, &forbidden).is_empty());
        let single = Structure {
            domain: vec!["a".into()],
            relations: BTreeMap::from([(String::from("E"), Relation { arity: 2, tuples: BTreeSet::new() })]),
        };
        let links = link_substructures(&single);
        assert_eq!(links.len(), 1);
        assert!(check_link_packed_free(&single, Some(&links), &forbidden).is_empty());
        assert!(check_link_packed_free(&c3, Some(&link_substructures(&two)), &[]).is_ok());
        let mut arrow = two.clone();
        arrow.relations.get_mut("E").unwrap().tuples.remove(&vec![1, 0]);
        assert!(check_link_packed_free(&arrow, Some(&link_substructures(&two)), &[]).fails("link-type"));
    }
}
