//! Exhaustive search for small dependence models.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::semantics::{Assignment, DependenceModel, Obj};
use crate::structure::permutations;
use crate::syntax::{Formula, PredId, Vocabulary};

/// Models examined before `bounded_model_search` gives up.
pub const MODEL_BUDGET: usize = 5_000_000;

/// Find a model over `vocab` with at most `max_domain` objects and
/// `max_team` assignments satisfying `phi` at some assignment.
///
/// Only the symbols of `phi` are enumerated: teams are sets of
/// assignments using every object, taken up to renaming of objects, and
/// predicates are only decided on tuples `s(𝐱)` for atoms `P𝐱` of `phi`.
/// The witness is lifted back to `vocab` by sending the remaining
/// variables to one object and leaving the remaining predicates empty.
/// Fails with `ResourceCap` after `budget` candidate models.
pub fn bounded_model_search(
    phi: &Formula,
    vocab: &Vocabulary,
    max_domain: usize,
    max_team: usize,
    budget: usize,
) -> Result<Option<(DependenceModel, usize)>> {
    phi.check(vocab)?;
    let local = vocab.restrict(phi.vars(), &phi.predicates());
    let f = phi.transfer(vocab, &local)?;
    let k = local.num_vars();
    let mut atoms: Vec<(PredId, Vec<usize>)> = Vec::new();
    f.visit(&mut |g| {
        if let Formula::Atom(p, args) = g {
            atoms.push((*p, args.iter().map(|v| v.0).collect()));
        }
    });
    atoms.sort();
    atoms.dedup();
    let mut spent = 0usize;
    for n in 1..=max_domain {
        if k == 0 && n > 1 {
            break;
        }
        let all: Vec<Assignment> = assignments(n, k);
        let perms = permutations(n);
        for size in 1..=max_team.min(all.len()) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                let team: Vec<Assignment> = combo.iter().map(|&i| all[i].clone()).collect();
                let used: BTreeSet<Obj> = team.iter().flat_map(|s| s.0.iter().copied()).collect();
                if (used.len() == n || k == 0) && is_canonical(&team, &perms) {
                    let relevant: Vec<(PredId, Vec<Obj>)> = atoms
                        .iter()
                        .flat_map(|(p, args)| team.iter().map(move |s| (*p, args.iter().map(|&v| s.0[v]).collect())))
                        .collect::<BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    if relevant.len() >= 40 {
                        return Err(Error::ResourceCap(format!("{} undetermined atoms", relevant.len())));
                    }
                    for mask in 0u64..(1u64 << relevant.len()) {
                        spent += 1;
                        if spent > budget {
                            return Err(Error::ResourceCap(format!("more than {budget} candidate models")));
                        }
                        let mut interpretation = vec![BTreeSet::new(); local.num_preds()];
                        for (i, (p, t)) in relevant.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                interpretation[p.0].insert(t.clone());
                            }
                        }
                        let m = DependenceModel {
                            vocab: local.clone(),
                            domain: (0..n).map(|i| format!("o{}", i + 1)).collect(),
                            interpretation,
                            team: team.clone(),
                        };
                        let table = m.table(&f)?;
                        if let Some(s) = table.iter().position(|&b| b) {
                            return Ok(Some((lift_model(&m, vocab)?, s)));
                        }
                    }
                }
                if !next_combination(&mut combo, all.len()) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Extend a model over a sub-vocabulary of `vocab` to all of `vocab`.
pub fn lift_model(m: &DependenceModel, vocab: &Vocabulary) -> Result<DependenceModel> {
    let var_map = m
        .vocab
        .vars()
        .map(|v| vocab.map_var(&m.vocab, v))
        .collect::<Result<Vec<_>>>()?;
    let pred_map = m
        .vocab
        .preds()
        .map(|p| vocab.map_pred(&m.vocab, p))
        .collect::<Result<Vec<_>>>()?;
    let mut domain = m.domain.clone();
    if domain.is_empty() {
        domain.push("o1".into());
    }
    let mut interpretation = vec![BTreeSet::new(); vocab.num_preds()];
    for (i, rel) in m.interpretation.iter().enumerate() {
        interpretation[pred_map[i].0] = rel.clone();
    }
    let team = m
        .team
        .iter()
        .map(|s| {
            let mut v = vec![Obj(0); vocab.num_vars()];
            for (i, o) in s.0.iter().enumerate() {
                v[var_map[i].0] = *o;
            }
            Assignment(v)
        })
        .collect();
    DependenceModel::new(vocab.clone(), domain, interpretation, team)
}

fn assignments(n: usize, k: usize) -> Vec<Assignment> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Obj>| {
                (0..n as u32).map(move |a| {
                    let mut u = t.clone();
                    u.push(Obj(a));
                    u
                })
            })
            .collect();
    }
    out.into_iter().map(Assignment).collect()
}

/// The team is the least of its images under renaming of objects.
fn is_canonical(team: &[Assignment], perms: &[crate::structure::Perm]) -> bool {
    let mut sorted: Vec<&Assignment> = team.iter().collect();
    sorted.sort();
    perms.iter().all(|p| {
        let mut img: Vec<Assignment> = team
            .iter()
            .map(|s| Assignment(s.0.iter().map(|o| Obj(p.apply(o.0))).collect()))
            .collect();
        img.sort();
        img.iter().lt(sorted.iter().copied()).then_some(()).is_none()
    })
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn search(text: &str, vocab: &Vocabulary) -> Option<(DependenceModel, usize)> {
        let f = parse_formula(text, vocab).unwrap();
        let out = bounded_model_search(&f, vocab, 3, 4, MODEL_BUDGET).unwrap();
        if let Some((m, s)) = &out {
            assert!(m.validate().is_ok());
            assert!(m.eval(*s, &f).unwrap());
        }
        out
    }

    #[test]
    fn contradiction_has_no_model() {
        let v = Vocabulary::from_names(&["x", "y"], &[("P", 1)]);
        assert!(search("P(x) & !P(x)", &v).is_none());
    }

    #[test]
    fn finds_asymmetric_dependence() {
        let v = Vocabulary::from_names(&["x", "y", "z"], &[("P", 1), ("Q", 2)]);
        let (m, _) = search("dep({x},y) & !dep({y},x)", &v).unwrap();
        assert!(m.domain.len() <= 2 && m.team.len() <= 3);
        assert_eq!(m.vocab, v);
    }

    #[test]
    fn canonical_teams() {
        let perms = permutations(2);
        let t = |v: &[[u32; 1]]| v.iter().map(|a| Assignment(vec![Obj(a[0])])).collect::<Vec<_>>();
        assert!(is_canonical(&t(&[[0]]), &perms));
        assert!(!is_canonical(&t(&[[1]]), &perms));
    }
}
