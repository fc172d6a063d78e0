//! Good-path unravelling of type models, the cut-off model and the
//! partial isomorphisms used for extension arguments.

mod herwig;
mod search;

pub use herwig::{search_herwig_extension, verify_herwig_extension, HerwigSearch, SEARCH_BUDGET};
pub use search::{bounded_model_search, lift_model, MODEL_BUDGET};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::semantics::{Assignment, DependenceModel, Obj};
use crate::structure::{PartialMap, Structure};
use crate::syntax::{Formula, Vocabulary};
use crate::types::{PsiType, TypeModel};
use crate::vars::{Var, VarSet};

/// Name of the team relation in the `τ⁺ ∪ {A}` structure; not an
/// identifier, so it never clashes with a predicate.
pub const TEAM_RELATION: &str = "$team";

/// One good path `⟨Σ0, X1, Σ1, …, Xn, Σn⟩`, stored as a tree node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathNode {
    pub parent: Option<usize>,
    /// The set `Xn` labelling the last step (empty at the root).
    pub label: VarSet,
    /// Index of `last(π)` in the type model.
    pub ty: usize,
    /// `lh(π)`
    pub len: usize,
    /// Index of `v_π` in the team.
    pub assignment: usize,
}

/// The dependence model built from all good paths of bounded length.
#[derive(Debug, Clone)]
pub struct Unravelling {
    pub type_model: TypeModel,
    pub depth: usize,
    pub paths: Vec<PathNode>,
    /// Over the local vocabulary of the closure set.
    pub model: DependenceModel,
    /// Creation point `(path, variable)` of every object.
    pub origins: Vec<(usize, Var)>,
    /// Type index of every team member.
    pub team_types: Vec<usize>,
}

/// Unravel `tm` from root type `root` up to paths of length `depth`.
pub fn unravel(tm: &TypeModel, root: usize, depth: usize) -> Result<Unravelling> {
    if depth < 1 {
        return Err(Error::InvalidArgument("unravelling depth must be at least 1".into()));
    }
    if root >= tm.types().len() {
        return Err(Error::InvalidArgument(format!("no type with index {root}")));
    }
    let report = tm.validate();
    if !report.is_ok() {
        return Err(Error::InvalidArgument(format!("not a type model: {report}")));
    }
    let psi = tm.closure();
    let vars = psi.relevant_vars();
    let k = psi.num_vars();
    let mut b = Builder::default();
    b.add(None, VarSet::EMPTY, root, vec![None; k]);
    let mut next = 0;
    while next < b.paths.len() {
        let node = b.paths[next].clone();
        if node.len < depth {
            let sigma = &tm.types()[node.ty];
            for x in vars.subsets() {
                let keep = sigma.dep_closure(psi, x);
                for (j, delta) in tm.types().iter().enumerate() {
                    if sigma.sim(delta, psi, x) {
                        // reuse exactly the values determined by X at the parent
                        let parent_values = &b.team[node.assignment];
                        let values = (0..k)
                            .map(|v| keep.contains(Var(v)).then(|| parent_values.get(Var(v))))
                            .collect();
                        b.add(Some(next), x, j, values);
                    }
                }
            }
        }
        next += 1;
    }
    let Builder {
        paths,
        origins,
        team,
        team_types,
        ..
    } = b;

    let vocab = psi.vocab().clone();
    let mut interpretation = vec![BTreeSet::new(); vocab.num_preds()];
    for node in &paths {
        let sigma = &tm.types()[node.ty];
        let v = &team[node.assignment];
        for p in vocab.preds() {
            for args in tuples(k, vocab.arity(p)) {
                if let Some(i) = psi.index_of(&Formula::Atom(p, args.clone())) {
                    if sigma.contains(i) {
                        interpretation[p.0].insert(v.project(&args));
                    }
                }
            }
        }
    }
    let domain = origins
        .iter()
        .map(|(p, x)| format!("p{}.{}", p, vocab.var_name(*x)))
        .collect();
    let model = DependenceModel {
        vocab,
        domain,
        interpretation,
        team,
    };
    Ok(Unravelling {
        type_model: tm.clone(),
        depth,
        paths,
        model,
        origins,
        team_types,
    })
}

#[derive(Default)]
struct Builder {
    paths: Vec<PathNode>,
    origins: Vec<(usize, Var)>,
    team: Vec<Assignment>,
    team_types: Vec<usize>,
    seen: BTreeMap<Assignment, usize>,
}

impl Builder {
    /// Add a path whose assignment takes the given values, inventing a
    /// fresh object wherever no value is given.
    fn add(&mut self, parent: Option<usize>, label: VarSet, ty: usize, values: Vec<Option<Obj>>) {
        let id = self.paths.len();
        let mut objs = Vec::with_capacity(values.len());
        for (x, v) in values.into_iter().enumerate() {
            objs.push(v.unwrap_or_else(|| {
                self.origins.push((id, Var(x)));
                Obj(self.origins.len() as u32 - 1)
            }));
        }
        let a = Assignment(objs);
        let idx = match self.seen.get(&a) {
            Some(&i) => i,
            None => {
                self.seen.insert(a.clone(), self.team.len());
                self.team.push(a);
                self.team_types.push(ty);
                self.team.len() - 1
            }
        };
        let len = parent.map_or(1, |p| self.paths[p].len + 1);
        self.paths.push(PathNode {
            parent,
            label,
            ty,
            len,
            assignment: idx,
        });
    }
}

/// All `r`-tuples over `k` variables.
pub(crate) fn tuples(k: usize, r: usize) -> Vec<Vec<Var>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |v| {
                    let mut u = t.clone();
                    u.push(Var(v));
                    u
                })
            })
            .collect();
    }
    out
}

impl Unravelling {
    pub fn last(&self, path: usize) -> &PsiType {
        &self.type_model.types()[self.paths[path].ty]
    }

    pub fn assignment(&self, path: usize) -> &Assignment {
        &self.model.team[self.paths[path].assignment]
    }

    /// `⟨Σ0, X1, Σ1, …⟩` as (label, type index) steps from the root.
    pub fn sequence(&self, path: usize) -> Vec<(VarSet, usize)> {
        let mut out = Vec::new();
        let mut cur = Some(path);
        while let Some(i) = cur {
            out.push((self.paths[i].label, self.paths[i].ty));
            cur = self.paths[i].parent;
        }
        out.reverse();
        out
    }

    pub fn show_path(&self, path: usize) -> String {
        let vocab = self.model.vocab.clone();
        let mut s = String::from("<");
        for (i, (x, t)) in self.sequence(path).into_iter().enumerate() {
            if i > 0 {
                s.push_str(&format!(", {}, ", vocab.show_set(x)));
            }
            s.push_str(&format!("T{t}"));
        }
        s.push('>');
        s
    }

    /// `a` is an initial segment of `b`.
    pub fn is_prefix(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        while let Some(i) = cur {
            if i == a {
                return true;
            }
            cur = self.paths[i].parent;
        }
        false
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        self.paths.iter().map(|p| p.parent).collect()
    }

    /// `F: π ↦ v_π[V]`
    pub fn bags(&self) -> Vec<BTreeSet<Obj>> {
        (0..self.paths.len())
            .map(|i| self.assignment(i).0.iter().copied().collect())
            .collect()
    }

    /// Largest number of children of any node.
    pub fn max_branching(&self) -> usize {
        let mut count = vec![0usize; self.paths.len()];
        for p in &self.paths {
            if let Some(q) = p.parent {
                count[q] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// The path `π_Δ = ⟨Σ0, ∅, Δ⟩` for type index `ty`.
    pub fn level_two_path(&self, ty: usize) -> Option<usize> {
        self.paths
            .iter()
            .position(|p| p.parent == Some(0) && p.label.is_empty() && p.ty == ty)
    }

    /// Restrict to paths of length at most `max_len`: team, objects and
    /// interpretation are cut down accordingly.
    pub fn truncate(&self, max_len: usize) -> Unravelling {
        let keep: Vec<usize> = (0..self.paths.len()).filter(|&i| self.paths[i].len <= max_len).collect();
        self.restrict_paths(&keep, max_len.min(self.depth))
    }

    /// Drop a set of leaves and, unless shared, their assignments. The
    /// object set and the interpretation are left as they are.
    pub fn without_paths(&self, drop: &[usize]) -> Result<Unravelling> {
        if self.paths.iter().enumerate().any(|(i, p)| !drop.contains(&i) && p.parent.is_some_and(|q| drop.contains(&q))) {
            return Err(Error::InvalidArgument("only leaves can be removed".into()));
        }
        let keep: Vec<usize> = (0..self.paths.len()).filter(|i| !drop.contains(i)).collect();
        let mut out = self.restrict_paths(&keep, self.depth);
        out.model.domain = self.model.domain.clone();
        out.model.interpretation = self.model.interpretation.clone();
        let renumber: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        out.origins = self
            .origins
            .iter()
            .map(|&(p, x)| (renumber.get(&p).copied().unwrap_or(usize::MAX), x))
            .collect();
        let remap: BTreeMap<Obj, Obj> = self
            .objects_of(&keep)
            .into_iter()
            .enumerate()
            .map(|(i, o)| (Obj(i as u32), o))
            .collect();
        for s in &mut out.model.team {
            for v in &mut s.0 {
                *v = remap[v];
            }
        }
        Ok(out)
    }

    fn objects_of(&self, keep: &[usize]) -> Vec<Obj> {
        let set: BTreeSet<Obj> = keep
            .iter()
            .flat_map(|&i| self.assignment(i).0.iter().copied())
            .collect();
        set.into_iter().collect()
    }

    fn restrict_paths(&self, keep: &[usize], depth: usize) -> Unravelling {
        let path_map: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let objs = self.objects_of(keep);
        let obj_map: BTreeMap<Obj, Obj> = objs.iter().enumerate().map(|(n, &o)| (o, Obj(n as u32))).collect();
        let mut team_map: BTreeMap<usize, usize> = BTreeMap::new();
        let mut team = Vec::new();
        let mut team_types = Vec::new();
        let mut paths = Vec::new();
        for &i in keep {
            let node = &self.paths[i];
            let a = *team_map.entry(node.assignment).or_insert_with(|| {
                team.push(Assignment(
                    self.model.team[node.assignment].0.iter().map(|o| obj_map[o]).collect(),
                ));
                team_types.push(self.team_types[node.assignment]);
                team.len() - 1
            });
            paths.push(PathNode {
                parent: node.parent.and_then(|p| path_map.get(&p).copied()),
                label: node.label,
                ty: node.ty,
                len: node.len,
                assignment: a,
            });
        }
        let interpretation = self
            .model
            .interpretation
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter_map(|t| t.iter().map(|o| obj_map.get(o).copied()).collect::<Option<Vec<_>>>())
                    .collect()
            })
            .collect();
        let origins = objs
            .iter()
            .map(|o| {
                let (p, x) = self.origins[o.index()];
                (path_map.get(&p).copied().unwrap_or(usize::MAX), x)
            })
            .collect();
        Unravelling {
            type_model: self.type_model.clone(),
            depth,
            paths,
            model: DependenceModel {
                vocab: self.model.vocab.clone(),
                domain: objs.iter().map(|o| self.model.domain[o.index()].clone()).collect(),
                interpretation,
                team,
            },
            origins,
            team_types,
        }
    }
}

/// `𝕄_cut`: paths of length at most 3 of an unravelling of depth ≥ 3.
pub fn cutoff(u: &Unravelling) -> Result<Unravelling> {
    if u.depth < 3 {
        return Err(Error::InvalidArgument("the cut-off needs an unravelling of depth at least 3".into()));
    }
    Ok(u.truncate(3))
}

/// Check the tree decomposition `(T, F)` of `m`: `T` given by parent
/// pointers, `F` by bags of objects.
pub fn verify_k_tree(m: &DependenceModel, parent: &[Option<usize>], bags: &[BTreeSet<Obj>], k: usize) -> ValidationReport {
    let mut r = ValidationReport::new();
    let n = parent.len();
    if bags.len() != n {
        r.violation("tree", "one bag per node is required");
        return r;
    }
    let roots = parent.iter().filter(|p| p.is_none()).count();
    if n == 0 || roots != 1 {
        r.violation("tree", format!("expected exactly one root, found {roots}"));
        return r;
    }
    for (i, p) in parent.iter().enumerate() {
        let mut cur = *p;
        let mut steps = 0;
        while let Some(q) = cur {
            if q >= n || steps > n {
                r.violation("tree", format!("node {i} does not reach the root"));
                return r;
            }
            cur = parent[q];
            steps += 1;
        }
    }
    for (i, b) in bags.iter().enumerate() {
        if b.len() > k {
            r.violation("width", format!("bag {i} has {} > {k} elements", b.len()));
        }
    }
    for (p, rel) in m.vocab.preds().zip(&m.interpretation) {
        for t in rel {
            if !bags.iter().any(|b| t.iter().all(|o| b.contains(o))) {
                r.violation(
                    "i",
                    format!(
                        "live tuple {:?} of `{}` lies in no bag",
                        t.iter().map(|o| m.object_name(*o)).collect::<Vec<_>>(),
                        m.vocab.pred_name(p)
                    ),
                );
            }
        }
    }
    let objects: BTreeSet<Obj> = bags.iter().flatten().copied().collect();
    for o in objects {
        // connected iff exactly one holder has its parent outside the holders
        let tops = (0..n)
            .filter(|&i| bags[i].contains(&o) && !parent[i].is_some_and(|q| bags[q].contains(&o)))
            .count();
        if tops != 1 {
            r.violation("ii", format!("nodes holding {} are not connected", m.object_name(o)));
        }
    }
    r
}

/// For every path of length ≤ 2 and every `D_Xy`:
/// `D_Xy ∈ last(π)` iff the cut-off satisfies `D_Xy` at `v_π`.
pub fn check_restricted_truth_lemma(cut: &Unravelling) -> ValidationReport {
    let mut r = ValidationReport::new();
    let psi = cut.type_model.closure();
    let vars = psi.relevant_vars();
    for (i, node) in cut.paths.iter().enumerate() {
        if node.len > 2 {
            continue;
        }
        let sigma = cut.last(i);
        for x in vars.subsets() {
            let actual = cut.model.dependence_closure_at(node.assignment, x);
            let expected = sigma.dep_closure(psi, x);
            for y in vars.iter() {
                let (e, a) = (expected.contains(y), actual.contains(y));
                if e != a {
                    r.violation(
                        if e { "restricted-truth →" } else { "restricted-truth ←" },
                        format!(
                            "at {}: D_{}{} is {} in the type but {} in the model",
                            cut.show_path(i),
                            psi.vocab().show_set(x),
                            psi.vocab().var_name(y),
                            if e { "present" } else { "absent" },
                            if a { "true" } else { "false" }
                        ),
                    );
                }
            }
        }
    }
    r
}

/// The parts of the truth lemma that survive truncation at depth `d`:
/// predicate atoms everywhere, `D_Xy ∈ last(π) ⇒ v_π ⊨ D_Xy` everywhere,
/// and every quantifier-free member of `Ψ` exactly at paths shorter than
/// `d` (a child `(π, X, last(π))` refutes each absent dependence atom).
pub fn check_bounded_truth_lemma(u: &Unravelling) -> ValidationReport {
    let mut r = ValidationReport::new();
    let psi = u.type_model.closure();
    let tables = match u.model.closure_tables(psi) {
        Ok(t) => t,
        Err(e) => {
            r.violation("tables", format!("{e}"));
            return r;
        }
    };
    for (i, node) in u.paths.iter().enumerate() {
        let sigma = u.last(i);
        for f in 0..psi.len() {
            let formula = psi.formula(f);
            let exact = if node.len < u.depth {
                formula.modal_depth() == 0
            } else {
                formula.modal_depth() == 0 && !formula.contains_dep_atom()
            };
            let truth = tables[f][node.assignment];
            let member = sigma.contains(f);
            let bad = if exact {
                truth != member
            } else {
                matches!(formula, Formula::Dep(..)) && member && !truth
            };
            if bad {
                r.violation(
                    "bounded-truth",
                    format!("at {}: `{}` member={member} truth={truth}", u.show_path(i), psi.show(f)),
                );
            }
        }
    }
    r
}

/// The cut-off expanded with one `|X|`-ary predicate `R^{X,y}` per
/// dependence atom, holding of `v_π(𝐱)` whenever `D_Xy ∈ last(π)`.
pub struct Expanded {
    pub model: DependenceModel,
    /// `(X, y)` for each added predicate, in order after the original ones.
    pub dep_predicates: Vec<(VarSet, Var)>,
}

pub fn expand_dependence_predicates(cut: &Unravelling) -> Result<Expanded> {
    let psi = cut.type_model.closure();
    let base = &cut.model.vocab;
    let vars = psi.relevant_vars();
    let mut preds: Vec<(String, usize)> = base.predicates().to_vec();
    let mut dep_predicates = Vec::new();
    for x in vars.subsets() {
        for y in vars.iter() {
            let mut name = String::from("R");
            for v in x.iter() {
                name.push('_');
                name.push_str(base.var_name(v));
            }
            name.push_str("__");
            name.push_str(base.var_name(y));
            while preds.iter().any(|(p, _)| *p == name) {
                name.push('_');
            }
            preds.push((name, x.len()));
            dep_predicates.push((x, y));
        }
    }
    let vocab = Vocabulary::new(base.variables().to_vec(), preds)?;
    let mut interpretation = cut.model.interpretation.clone();
    for &(x, y) in &dep_predicates {
        let xs = x.to_vec();
        let rel: BTreeSet<Vec<Obj>> = (0..cut.paths.len())
            .filter(|&i| cut.last(i).contains(psi.dep(x, y)))
            .map(|i| cut.assignment(i).project(&xs))
            .collect();
        interpretation.push(rel);
    }
    Ok(Expanded {
        model: DependenceModel {
            vocab,
            domain: cut.model.domain.clone(),
            interpretation,
            team: cut.model.team.clone(),
        },
        dep_predicates,
    })
}

/// `p_π: v_π[V] → v_{π_Δ}[V]` for every path of length 3, each checked to
/// be a partial isomorphism of `structure`.
pub fn generate_partial_isos(cut: &Unravelling, structure: &Structure) -> Result<Vec<(usize, PartialMap)>> {
    let mut out = Vec::new();
    for (i, node) in cut.paths.iter().enumerate() {
        if node.len != 3 {
            continue;
        }
        let target = cut.level_two_path(node.ty).ok_or_else(|| {
            Error::InvalidModel(format!("no path ⟨Σ0, ∅, T{}⟩ in the cut-off", node.ty))
        })?;
        let from = cut.assignment(i);
        let to = cut.assignment(target);
        let p = PartialMap::new(from.0.iter().zip(&to.0).map(|(a, b)| (a.0, b.0)))
            .ok_or_else(|| Error::InvalidModel(format!("p for {} is not injective", cut.show_path(i))))?;
        if let Some(why) = p.partial_iso_failure(structure) {
            return Err(Error::InvalidModel(format!(
                "p for {} is not a partial isomorphism: {why}",
                cut.show_path(i)
            )));
        }
        out.push((i, p));
    }
    Ok(out)
}

/// For `q` in `maps` and team members with `q∘v_π =_X v_π'`: look for
/// `v_ρ, v_ρ'` with `q∘v_ρ = v_ρ'`, equal types, `v_ρ =_X v_π` and
/// `v_ρ' =_X v_π'`. Failures are reported per map.
pub fn check_path_lemma<'a>(cut: &Unravelling, maps: impl IntoIterator<Item = &'a PartialMap>) -> ValidationReport {
    let mut r = ValidationReport::new();
    let team = &cut.model.team;
    let vars = cut.model.vocab.all_vars();
    for q in maps {
        // total images: (ρ, ρ') with q∘v_ρ = v_ρ' and equal types
        let mut full: Vec<(usize, usize)> = Vec::new();
        for (a, s) in team.iter().enumerate() {
            let img: Option<Vec<Obj>> = s.0.iter().map(|o| q.apply(o.0).map(Obj)).collect();
            if let Some(img) = img {
                if let Some(b) = team.iter().position(|t| t.0 == img) {
                    if cut.team_types[a] == cut.team_types[b] {
                        full.push((a, b));
                    }
                }
            }
        }
        let mut failed = None;
        'outer: for (a, s) in team.iter().enumerate() {
            for (b, t) in team.iter().enumerate() {
                for x in vars.subsets() {
                    let holds = x.iter().all(|v| q.apply(s.get(v).0) == Some(t.get(v).0));
                    if !holds {
                        continue;
                    }
                    let ok = full
                        .iter()
                        .any(|&(c, d)| team[c].agrees(s, x) && team[d].agrees(t, x));
                    if !ok {
                        failed = Some((a, b, x));
                        break 'outer;
                    }
                }
            }
        }
        if let Some((a, b, x)) = failed {
            r.violation(
                "path-lemma",
                format!(
                    "map of size {} sends s{} to s{} on {} without a matching total pair",
                    q.len(),
                    a + 1,
                    b + 1,
                    cut.model.vocab.show_set(x)
                ),
            );
        }
    }
    r
}

#[cfg(test)]
mod tests;
