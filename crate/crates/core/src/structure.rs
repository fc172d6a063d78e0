//! Finite relational structures, partial maps and permutations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::report::ValidationReport;
use crate::semantics::DependenceModel;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<u32>>,
}

/// A finite structure over a relational signature; elements are indices
/// into `domain`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Structure {
    pub domain: Vec<String>,
    pub relations: BTreeMap<String, Relation>,
}

impl Structure {
    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn element(&self, name: &str) -> Option<u32> {
        self.domain.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let names: BTreeSet<&String> = self.domain.iter().collect();
        if names.len() != self.domain.len() {
            r.violation("domain", "duplicate element names");
        }
        for (name, rel) in &self.relations {
            for t in &rel.tuples {
                if t.len() != rel.arity {
                    r.violation("arity", format!("tuple of length {} in `{name}`", t.len()));
                }
                if t.iter().any(|&a| a as usize >= self.domain.len()) {
                    r.violation("domain", format!("`{name}` mentions an element outside the domain"));
                }
            }
        }
        r
    }

    /// Every tuple of every relation.
    pub fn live_tuples(&self) -> BTreeSet<Vec<u32>> {
        self.relations
            .values()
            .flat_map(|r| r.tuples.iter().cloned())
            .collect()
    }

    /// The substructure induced on `elems` (kept in the given order).
    pub fn induced(&self, elems: &[u32]) -> Structure {
        let pos: BTreeMap<u32, u32> = elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        Structure {
            domain: elems.iter().map(|&e| self.domain[e as usize].clone()).collect(),
            relations: self
                .relations
                .iter()
                .map(|(n, r)| {
                    let tuples = r
                        .tuples
                        .iter()
                        .filter_map(|t| t.iter().map(|a| pos.get(a).copied()).collect::<Option<Vec<_>>>())
                        .collect();
                    (n.clone(), Relation { arity: r.arity, tuples })
                })
                .collect(),
        }
    }

    /// The `τ ∪ {A}` structure of a dependence model: one relation per
    /// predicate plus the team relation named `team_name`.
    pub fn from_model(m: &DependenceModel, team_name: &str) -> Structure {
        let mut relations = BTreeMap::new();
        for p in m.vocab.preds() {
            relations.insert(
                m.vocab.pred_name(p).into(),
                Relation {
                    arity: m.vocab.arity(p),
                    tuples: m.interpretation[p.0]
                        .iter()
                        .map(|t| t.iter().map(|o| o.0).collect())
                        .collect(),
                },
            );
        }
        relations.insert(
            team_name.into(),
            Relation {
                arity: m.vocab.num_vars(),
                tuples: m.team.iter().map(|s| s.0.iter().map(|o| o.0).collect()).collect(),
            },
        );
        Structure {
            domain: m.domain.clone(),
            relations,
        }
    }

    /// Whether `self` sits inside `sup` as an induced substructure, matching
    /// elements by name; returns the embedding.
    pub fn embedding_into(&self, sup: &Structure) -> Result<Vec<u32>, String> {
        let emb = self
            .domain
            .iter()
            .map(|n| sup.element(n).ok_or_else(|| format!("element `{n}` is missing from the extension")))
            .collect::<Result<Vec<u32>, String>>()?;
        if self.relations.keys().ne(sup.relations.keys()) {
            return Err("the two structures have different signatures".into());
        }
        let back = sup.induced(&emb);
        for (name, r) in &self.relations {
            if back.relations[name] != *r {
                return Err(format!("relation `{name}` is not preserved on the substructure"));
            }
        }
        Ok(emb)
    }
}

/// A finite partial injective map, as sorted `(from, to)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialMap(Vec<(u32, u32)>);

impl PartialMap {
    pub fn new(pairs: impl IntoIterator<Item = (u32, u32)>) -> Option<PartialMap> {
        let m: BTreeMap<u32, u32> = pairs.into_iter().collect();
        let image: BTreeSet<u32> = m.values().copied().collect();
        if image.len() != m.len() {
            return None;
        }
        Some(PartialMap(m.into_iter().collect()))
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, a: u32) -> Option<u32> {
        self.0
            .binary_search_by_key(&a, |p| p.0)
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|p| p.0)
    }

    pub fn inverse(&self) -> PartialMap {
        let mut v: Vec<(u32, u32)> = self.0.iter().map(|&(a, b)| (b, a)).collect();
        v.sort();
        PartialMap(v)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &PartialMap) -> PartialMap {
        PartialMap(
            first
                .0
                .iter()
                .filter_map(|&(a, b)| self.apply(b).map(|c| (a, c)))
                .collect(),
        )
    }

    /// Preserves and reflects every relation on tuples drawn from its domain.
    pub fn is_partial_iso(&self, s: &Structure) -> bool {
        self.partial_iso_failure(s).is_none()
    }

    pub fn partial_iso_failure(&self, s: &Structure) -> Option<String> {
        let dom: BTreeSet<u32> = self.domain().collect();
        let img: BTreeSet<u32> = self.0.iter().map(|p| p.1).collect();
        for (name, r) in &s.relations {
            for t in &r.tuples {
                if t.iter().all(|a| dom.contains(a)) {
                    let u: Vec<u32> = t.iter().map(|&a| self.apply(a).unwrap()).collect();
                    if !r.tuples.contains(&u) {
                        return Some(format!("`{name}` not preserved on {t:?}"));
                    }
                }
                if t.iter().all(|a| img.contains(a)) {
                    let inv = self.inverse();
                    let u: Vec<u32> = t.iter().map(|&a| inv.apply(a).unwrap()).collect();
                    if !r.tuples.contains(&u) {
                        return Some(format!("`{name}` not reflected on {t:?}"));
                    }
                }
            }
        }
        None
    }

    pub fn is_partial_identity(&self) -> bool {
        self.0.iter().all(|&(a, b)| a == b)
    }
}

/// Close `gens` under composition and converse.
///
/// The result contains partial identities `p⁻¹∘p` and possibly the empty
/// map, but not the identity on the whole structure unless generated.
/// Stops with `None` once more than `cap` maps have been produced.
pub fn inverse_closure(gens: &[PartialMap], cap: usize) -> Option<BTreeSet<PartialMap>> {
    let mut basis: Vec<PartialMap> = Vec::new();
    for g in gens {
        basis.push(g.clone());
        basis.push(g.inverse());
    }
    basis.sort();
    basis.dedup();
    let mut all: BTreeSet<PartialMap> = basis.iter().cloned().collect();
    let mut frontier: Vec<PartialMap> = all.iter().cloned().collect();
    while let Some(q) = frontier.pop() {
        for b in &basis {
            for r in [b.after(&q), q.after(b)] {
                if all.insert(r.clone()) {
                    if all.len() > cap {
                        return None;
                    }
                    frontier.push(r);
                }
            }
        }
    }
    Some(all)
}

/// A permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &a)| a as usize == i)
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.0[a as usize]
    }

    pub fn is_permutation(&self) -> bool {
        let set: BTreeSet<u32> = self.0.iter().copied().collect();
        set.len() == self.0.len() && self.0.iter().all(|&a| (a as usize) < self.0.len())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = alloc::vec![0; self.0.len()];
        for (i, &a) in self.0.iter().enumerate() {
            v[a as usize] = i as u32;
        }
        Perm(v)
    }

    /// `self ∘ first`
    pub fn after(&self, first: &Perm) -> Perm {
        Perm(first.0.iter().map(|&a| self.apply(a)).collect())
    }

    pub fn is_automorphism(&self, s: &Structure) -> bool {
        self.0.len() == s.size()
            && self.is_permutation()
            && s.relations.values().all(|r| {
                r.tuples
                    .iter()
                    .all(|t| r.tuples.contains(&t.iter().map(|&a| self.apply(a)).collect::<Vec<_>>()))
            })
    }

    pub fn extends(&self, p: &PartialMap) -> bool {
        p.pairs()
            .iter()
            .all(|&(a, b)| (a as usize) < self.0.len() && self.apply(a) == b)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    loop {
        out.push(Perm(cur.clone()));
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Automorphisms of `s` extending `p`, by backtracking.
pub fn extending_automorphisms(s: &Structure, p: &PartialMap) -> Vec<Perm> {
    let n = s.size();
    let mut img: Vec<Option<u32>> = alloc::vec![None; n];
    let mut used = alloc::vec![false; n];
    for &(a, b) in p.pairs() {
        if a as usize >= n || b as usize >= n {
            return Vec::new();
        }
        img[a as usize] = Some(b);
        used[b as usize] = true;
    }
    let mut out = Vec::new();
    fn go(i: usize, s: &Structure, img: &mut Vec<Option<u32>>, used: &mut Vec<bool>, fixed: &[bool], out: &mut Vec<Perm>) {
        let n = img.len();
        if i == n {
            let perm = Perm(img.iter().map(|o| o.unwrap()).collect());
            if perm.is_automorphism(s) {
                out.push(perm);
            }
            return;
        }
        if fixed[i] {
            go(i + 1, s, img, used, fixed, out);
            return;
        }
        for b in 0..n {
            if !used[b] {
                used[b] = true;
                img[i] = Some(b as u32);
                go(i + 1, s, img, used, fixed, out);
                used[b] = false;
                img[i] = None;
            }
        }
    }
    let fixed: Vec<bool> = img.iter().map(Option::is_some).collect();
    go(0, s, &mut img, &mut used, &fixed, &mut out);
    out
}

/// The group generated by `gens` (always containing the identity).
pub fn generated_group(n: usize, gens: &[Perm]) -> BTreeSet<Perm> {
    let mut all: BTreeSet<Perm> = BTreeSet::new();
    all.insert(Perm::identity(n));
    let mut frontier: Vec<Perm> = alloc::vec![Perm::identity(n)];
    while let Some(g) = frontier.pop() {
        for h in gens {
            for k in [h.after(&g), h.inverse().after(&g)] {
                if all.insert(k.clone()) {
                    frontier.push(k);
                }
            }
        }
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pm(p: &[(u32, u32)]) -> PartialMap {
        PartialMap::new(p.iter().copied()).unwrap()
    }

    #[test]
    fn composition_and_inverse() {
        let p = pm(&[(0, 1)]);
        assert_eq!(p.inverse(), pm(&[(1, 0)]));
        assert_eq!(p.inverse().after(&p), pm(&[(0, 0)]));
        assert_eq!(p.after(&p.inverse()), pm(&[(1, 1)]));
        assert!(p.after(&p).is_empty());
        assert!(PartialMap::new([(0, 1), (2, 1)]).is_none());
    }

    #[test]
    fn inverse_closure_of_one_map() {
        let p = pm(&[(0, 1)]);
        let c = inverse_closure(&[p.clone()], 100).unwrap();
        let expected: BTreeSet<PartialMap> =
            [p.clone(), p.inverse(), pm(&[(0, 0)]), pm(&[(1, 1)]), PartialMap::default()].into();
        assert_eq!(c, expected);
        assert!(inverse_closure(&[], 10).unwrap().is_empty());
        for q in &c {
            assert!(c.contains(&q.inverse()));
        }
        assert!(inverse_closure(&[p], 2).is_none());
    }

    #[test]
    fn permutations_and_groups() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0).len(), 1);
        let rot = Perm(vec![1, 2, 0]);
        assert_eq!(generated_group(3, &[rot.clone()]).len(), 3);
        let cycle = Structure {
            domain: vec!["1".into(), "2".into(), "3".into()],
            relations: [(
                "E".into(),
                Relation {
                    arity: 2,
                    tuples: [vec![0, 1], vec![1, 2], vec![2, 0]].into(),
                },
            )]
            .into(),
        };
        assert!(rot.is_automorphism(&cycle));
        assert_eq!(extending_automorphisms(&cycle, &pm(&[(0, 1)])), vec![rot]);
        let sub = cycle.induced(&[0, 1]);
        assert_eq!(sub.relations["E"].tuples.len(), 1);
        assert_eq!(sub.embedding_into(&cycle).unwrap(), vec![0, 1]);
        assert!(pm(&[(0, 1)]).is_partial_iso(&sub));
        assert!(!pm(&[(0, 1), (1, 0)]).is_partial_iso(&sub));
    }
}
