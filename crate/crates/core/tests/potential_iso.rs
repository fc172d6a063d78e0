//! LFD⁼ bisimulation against the k-pebble game on full models.

mod common;

use std::collections::BTreeSet;

use common::full_model;
use lfd_core::bisim::{refine, BisimKind, BisimOptions};
use lfd_core::semantics::Assignment;
use lfd_core::{DependenceModel, Obj, PredId, Var};
use proptest::prelude::*;

/// `s ↦ t` on the variables is a partial isomorphism (atoms and equalities).
fn partial_iso(m: &DependenceModel, s: &Assignment, m2: &DependenceModel, t: &Assignment) -> bool {
    let k = m.vocab.num_vars();
    for x in 0..k {
        for y in 0..k {
            if (s.get(Var(x)) == s.get(Var(y))) != (t.get(Var(x)) == t.get(Var(y))) {
                return false;
            }
            if m.holds(PredId(1), &[s.get(Var(x)), s.get(Var(y))]) != m2.holds(PredId(1), &[t.get(Var(x)), t.get(Var(y))]) {
                return false;
            }
        }
        if m.holds(PredId(0), &[s.get(Var(x))]) != m2.holds(PredId(0), &[t.get(Var(x))]) {
            return false;
        }
    }
    true
}

fn moved(s: &Assignment, x: usize, o: u32) -> Assignment {
    let mut t = s.clone();
    t.0[x] = Obj(o);
    t
}

/// Winning positions of the duplicator in the existential-free k-pebble
/// game, all pebbles placed: the largest back-and-forth system of
/// positions whose pebble map is a partial isomorphism.
fn pebble_game(m: &DependenceModel, m2: &DependenceModel) -> BTreeSet<(usize, usize)> {
    let k = m.vocab.num_vars();
    let (n, n2) = (m.domain.len() as u32, m2.domain.len() as u32);
    let idx = |mm: &DependenceModel, s: &Assignment| mm.team_index(s).unwrap();
    let mut win: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, s) in m.team.iter().enumerate() {
        for (j, t) in m2.team.iter().enumerate() {
            if partial_iso(m, s, m2, t) {
                win.insert((i, j));
            }
        }
    }
    loop {
        let keep: BTreeSet<(usize, usize)> = win
            .iter()
            .copied()
            .filter(|&(i, j)| {
                let (s, t) = (&m.team[i], &m2.team[j]);
                (0..k).all(|x| {
                    (0..n).all(|a| (0..n2).any(|b| win.contains(&(idx(m, &moved(s, x, a)), idx(m2, &moved(t, x, b))))))
                        && (0..n2).all(|b| (0..n).any(|a| win.contains(&(idx(m, &moved(s, x, a)), idx(m2, &moved(t, x, b))))))
                })
            })
            .collect();
        if keep == win {
            return win;
        }
        win = keep;
    }
}

fn lfd_eq(m: &DependenceModel, m2: &DependenceModel) -> BTreeSet<(usize, usize)> {
    refine(m, m2, BisimKind::Dependence, BisimOptions { eq_atoms: true }).unwrap().pairs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equality_bisimulation_is_potential_isomorphism(a in full_model(3), b in full_model(3)) {
        prop_assert!(a.is_full() && b.is_full());
        prop_assert_eq!(lfd_eq(&a, &b), pebble_game(&a, &b));
    }

    #[test]
    fn self_comparison(a in full_model(3)) {
        let z = lfd_eq(&a, &a);
        prop_assert!((0..a.team.len()).all(|i| z.contains(&(i, i))));
        prop_assert_eq!(z, pebble_game(&a, &a));
    }
}

#[test]
fn two_pebbles_cannot_count_to_three() {
    // a complete loop-free graph on two versus three objects: FO² does not
    // tell them apart without a third variable
    let complete = |n: u32| {
        let b: Vec<bool> = (0..n * n).map(|i| i / n != i % n).collect();
        common::build(n, &vec![false; n as usize], &b, common::all_assignments(n))
    };
    let (two, three) = (complete(2), complete(3));
    let z = lfd_eq(&two, &three);
    assert!(!z.is_empty());
    assert_eq!(z, pebble_game(&two, &three));
    // without equality atoms the dependence atoms still separate sizes one and two
    let one = complete(1);
    assert!(refine(&one, &two, BisimKind::Dependence, BisimOptions::default()).unwrap().is_empty());
}
