//! Checking and searching for Herwig extensions of small structures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::structure::{extending_automorphisms, generated_group, PartialMap, Perm, Relation, Structure};

/// Cap on `(partial map, automorphism)` pairs while checking (iii).
const PAIR_CAP: usize = 200_000;

/// Candidate extensions examined before `search_herwig_extension` gives up.
pub const SEARCH_BUDGET: usize = 200_000;

/// Check conditions (i)–(iii) for an extension `cplus` of `c` with
/// partial isomorphisms `ps` of `c` and their chosen automorphisms `hats`
/// of `cplus`. Elements of `c` are matched to `cplus` by name.
pub fn verify_herwig_extension(c: &Structure, ps: &[PartialMap], cplus: &Structure, hats: &[Perm]) -> ValidationReport {
    let mut r = ValidationReport::new();
    r.extend(c.validate());
    r.extend(cplus.validate());
    if !r.is_ok() {
        return r;
    }
    let emb = match c.embedding_into(cplus) {
        Ok(e) => e,
        Err(why) => {
            r.violation("embedding", why);
            return r;
        }
    };
    if hats.len() != ps.len() {
        r.violation("hats", format!("{} partial maps but {} automorphisms", ps.len(), hats.len()));
        return r;
    }
    let n = cplus.size();
    // partial maps moved into the coordinates of C⁺
    let mut lifted = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        if p.pairs().iter().any(|&(a, b)| a as usize >= c.size() || b as usize >= c.size()) {
            r.violation("partial-iso", format!("p{} mentions an element outside C", i + 1));
            return r;
        }
        if let Some(why) = p.partial_iso_failure(c) {
            r.violation("partial-iso", format!("p{} is not a partial isomorphism of C: {why}", i + 1));
        }
        lifted.push(PartialMap::new(p.pairs().iter().map(|&(a, b)| (emb[a as usize], emb[b as usize]))).unwrap());
    }

    // (i)
    for (i, (p, h)) in lifted.iter().zip(hats).enumerate() {
        if h.0.len() != n || !h.is_permutation() {
            r.violation("i", format!("the map chosen for p{} is not a permutation of C⁺", i + 1));
            continue;
        }
        if !h.is_automorphism(cplus) {
            r.violation("i", format!("the map chosen for p{} is not an automorphism of C⁺", i + 1));
            continue;
        }
        if !h.extends(p) {
            r.violation("i", format!("the automorphism chosen for p{} does not extend it", i + 1));
            continue;
        }
        let count = extending_automorphisms(cplus, p).len();
        if count > 1 {
            r.warning("i-unique", format!("p{} extends to {count} automorphisms", i + 1));
        }
    }
    if !r.is_ok() {
        return r;
    }
    let group = generated_group(n, hats);
    let inside: BTreeSet<u32> = emb.iter().copied().collect();
    let maps_in = |t: &[u32]| group.iter().any(|f| t.iter().all(|a| inside.contains(&f.apply(*a))));

    // (ii)
    for t in cplus.live_tuples() {
        if !maps_in(&t) {
            r.violation("ii", format!("live tuple ({}) cannot be moved into C", show(cplus, &t)));
        }
    }
    for a in 0..n as u32 {
        if !maps_in(&[a]) {
            r.violation("ii", format!("element {} cannot be moved into C", cplus.domain[a as usize]));
        }
    }

    // (iii): pairs (p, p̂) closed under composition and converse
    let mut basis: Vec<(PartialMap, Perm)> = Vec::new();
    for (p, h) in lifted.iter().zip(hats) {
        basis.push((p.clone(), h.clone()));
        basis.push((p.inverse(), h.inverse()));
    }
    let mut pairs: BTreeSet<(PartialMap, Perm)> = basis.iter().cloned().collect();
    let mut frontier: Vec<(PartialMap, Perm)> = pairs.iter().cloned().collect();
    while let Some((q, g)) = frontier.pop() {
        for (b, h) in &basis {
            for next in [(b.after(&q), h.after(&g)), (q.after(b), g.after(h))] {
                if pairs.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        if pairs.len() > PAIR_CAP {
            r.warning("iii-cap", format!("more than {PAIR_CAP} composed maps; (iii) left unchecked"));
            return r;
        }
    }
    let mut by_hat: BTreeMap<&Perm, Vec<&PartialMap>> = BTreeMap::new();
    for (p, g) in &pairs {
        by_hat.entry(g).or_default().push(p);
    }
    for f in &group {
        if f.is_identity() {
            continue;
        }
        let candidates = by_hat.get(f).map(Vec::as_slice).unwrap_or(&[]);
        for &a in &emb {
            let b = f.apply(a);
            if !inside.contains(&b) {
                continue;
            }
            let matching: BTreeSet<&PartialMap> = candidates.iter().copied().filter(|p| p.apply(a) == Some(b)).collect();
            if matching.len() != 1 {
                r.violation(
                    "iii",
                    format!(
                        "an automorphism sends {} to {} with {} matching composed maps",
                        cplus.domain[a as usize],
                        cplus.domain[b as usize],
                        matching.len()
                    ),
                );
            }
        }
    }
    r
}

fn show(s: &Structure, t: &[u32]) -> String {
    let mut out = String::new();
    for (i, a) in t.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&s.domain[*a as usize]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HerwigSearch {
    Found { extension: Structure, hats: Vec<Perm> },
    /// Every candidate up to the size bound was examined and none passed.
    NotFoundWithinSize,
}

/// Try extensions of `c` with up to `max_size` new elements, every
/// choice of new tuples and every choice of extending automorphisms.
///
/// New elements are interchangeable, so candidates whose new elements
/// are not sorted by decreasing degree are skipped. Fails with
/// `ResourceCap` when `|C| + max_size > 7` or more than `budget`
/// candidates would be examined.
pub fn search_herwig_extension(c: &Structure, ps: &[PartialMap], max_size: usize, budget: usize) -> Result<HerwigSearch> {
    if c.size() + max_size > 7 {
        return Err(Error::ResourceCap(format!(
            "herwig search is limited to 7 elements, asked for {} + {max_size}",
            c.size()
        )));
    }
    let r = c.validate();
    if !r.is_ok() {
        return Err(Error::InvalidArgument(format!("{r}")));
    }
    for p in ps {
        if p.pairs().iter().any(|&(a, b)| a as usize >= c.size() || b as usize >= c.size()) || !p.is_partial_iso(c) {
            return Err(Error::InvalidArgument("every p must be a partial isomorphism of C".into()));
        }
    }
    let mut spent = 0usize;
    for extra in 0..=max_size {
        let n = c.size() + extra;
        let mut domain = c.domain.clone();
        for i in 0..extra {
            let mut name = format!("new{}", i + 1);
            while domain.contains(&name) {
                name.push('\'');
            }
            domain.push(name);
        }
        // tuples that touch at least one new element
        let mut free: Vec<(String, Vec<u32>)> = Vec::new();
        for (name, rel) in &c.relations {
            for t in all_tuples(n, rel.arity) {
                if t.iter().any(|&a| a as usize >= c.size()) {
                    free.push((name.clone(), t));
                }
            }
        }
        if free.len() >= usize::BITS as usize - 1 {
            return Err(Error::ResourceCap(format!("{} optional tuples", free.len())));
        }
        for mask in 0u64..(1u64 << free.len()) {
            let chosen: Vec<&(String, Vec<u32>)> = free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t).collect();
            let mut degree = vec![0usize; extra];
            for (_, t) in &chosen {
                for &a in t {
                    if a as usize >= c.size() {
                        degree[a as usize - c.size()] += 1;
                    }
                }
            }
            if degree.windows(2).any(|w| w[0] < w[1]) {
                continue;
            }
            spent += 1;
            if spent > budget {
                return Err(Error::ResourceCap(format!("more than {budget} candidate extensions")));
            }
            let mut relations: BTreeMap<String, Relation> = c.relations.clone();
            for (name, t) in chosen {
                relations.get_mut(name).unwrap().tuples.insert(t.clone());
            }
            let cand = Structure {
                domain: domain.clone(),
                relations,
            };
            let options: Vec<Vec<Perm>> = ps.iter().map(|p| extending_automorphisms(&cand, p)).collect();
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut pick = vec![0usize; ps.len()];
            loop {
                spent += 1;
                if spent > budget {
                    return Err(Error::ResourceCap(format!("more than {budget} candidate extensions")));
                }
                let hats: Vec<Perm> = pick.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
                if verify_herwig_extension(c, ps, &cand, &hats).is_ok() {
                    return Ok(HerwigSearch::Found { extension: cand, hats });
                }
                // next combination
                let mut i = 0;
                while i < pick.len() {
                    pick[i] += 1;
                    if pick[i] < options[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
                if i == pick.len() {
                    break;
                }
            }
        }
    }
    Ok(HerwigSearch::NotFoundWithinSize)
}

fn all_tuples(n: usize, r: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n as u32).map(move |a| {
                    let mut u = t.clone();
                    u.push(a);
                    u
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(n: usize, edges: &[(u32, u32)]) -> Structure {
        let mut relations = BTreeMap::new();
        relations.insert(
            String::from("E"),
            Relation {
                arity: 2,
                tuples: edges.iter().map(|&(a, b)| vec![a, b]).collect(),
            },
        );
        Structure {
            domain: (1..=n).map(|i| format!("{i}")).collect(),
            relations,
        }
    }

    fn pm(p: &[(u32, u32)]) -> PartialMap {
        PartialMap::new(p.iter().copied()).unwrap()
    }

    fn herwig_one() -> (Structure, Vec<PartialMap>, Structure, Vec<Perm>) {
        (
            structure(2, &[(0, 1)]),
            vec![pm(&[(0, 1)])],
            structure(3, &[(0, 1), (1, 2), (2, 0)]),
            vec![Perm(vec![1, 2, 0])],
        )
    }

    #[test]
    fn herwig_one_passes() {
        let (c, ps, cp, hats) = herwig_one();
        let r = verify_herwig_extension(&c, &ps, &cp, &hats);
        assert!(r.is_empty(), "{r}");
    }

    #[test]
    fn broken_automorphism_fails_i() {
        let (c, ps, _, hats) = herwig_one();
        let cp = structure(3, &[(0, 1), (1, 2)]);
        let r = verify_herwig_extension(&c, &ps, &cp, &hats);
        assert!(r.fails("i"));
    }

    #[test]
    fn missing_witness_fails_ii() {
        let (c, _, cp, _) = herwig_one();
        let r = verify_herwig_extension(&c, &[], &cp, &[]);
        assert!(r.fails("ii") && !r.fails("i") && !r.fails("iii"));
    }

    #[test]
    fn ambiguous_map_fails_iii() {
        let c = structure(2, &[]);
        let ps = vec![pm(&[(0, 1)]), pm(&[(0, 1), (1, 0)])];
        let hats = vec![Perm(vec![1, 0]), Perm(vec![1, 0])];
        let r = verify_herwig_extension(&c, &ps, &c, &hats);
        assert!(r.fails("iii") && !r.fails("i") && !r.fails("ii"), "{r}");
    }

    #[test]
    fn trivial_extension() {
        let c = structure(2, &[(0, 1)]);
        assert!(verify_herwig_extension(&c, &[], &c, &[]).is_empty());
        assert_eq!(
            search_herwig_extension(&c, &[], 0, SEARCH_BUDGET).unwrap(),
            HerwigSearch::Found {
                extension: c.clone(),
                hats: vec![]
            }
        );
    }

    #[test]
    fn search_recovers_herwig_one() {
        let (c, ps, _, _) = herwig_one();
        match search_herwig_extension(&c, &ps, 3, SEARCH_BUDGET).unwrap() {
            HerwigSearch::Found { extension, hats } => {
                assert!(extension.size() <= 5);
                assert!(verify_herwig_extension(&c, &ps, &extension, &hats).is_ok());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(search_herwig_extension(&c, &ps, 0, SEARCH_BUDGET).unwrap(), HerwigSearch::NotFoundWithinSize);
        assert!(matches!(search_herwig_extension(&c, &ps, 6, SEARCH_BUDGET), Err(Error::ResourceCap(_))));
    }
}
