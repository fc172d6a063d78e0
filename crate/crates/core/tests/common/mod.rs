#![allow(dead_code)]

use std::collections::BTreeSet;

use lfd_core::semantics::Assignment;
use lfd_core::{DependenceModel, Formula, Obj, PredId, Var, VarSet, Vocabulary};
use proptest::prelude::*;

pub fn vocab() -> Vocabulary {
    Vocabulary::from_names(&["x", "y"], &[("P", 1), ("R", 2)])
}

pub fn all_assignments(n: u32) -> Vec<Assignment> {
    (0..n)
        .flat_map(|a| (0..n).map(move |b| Assignment(vec![Obj(a), Obj(b)])))
        .collect()
}

pub fn build(n: u32, unary: &[bool], binary: &[bool], team: impl IntoIterator<Item = Assignment>) -> DependenceModel {
    let p: BTreeSet<Vec<Obj>> = (0..n).filter(|&a| unary[a as usize]).map(|a| vec![Obj(a)]).collect();
    let r: BTreeSet<Vec<Obj>> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| binary[(a * n + b) as usize])
        .map(|(a, b)| vec![Obj(a), Obj(b)])
        .collect();
    let domain = (0..n).map(|i| format!("o{i}")).collect();
    DependenceModel::new(vocab(), domain, vec![p, r], team.into_iter().collect()).unwrap()
}

/// Models over `vocab()` with at most three objects and four assignments.
pub fn model() -> impl Strategy<Value = DependenceModel> {
    (1..=3u32).prop_flat_map(|n| {
        let k = (n * n) as usize;
        (
            prop::collection::vec(any::<bool>(), n as usize),
            prop::collection::vec(any::<bool>(), k),
            Just(all_assignments(n)).prop_shuffle(),
            1..=k.min(4),
        )
            .prop_map(move |(u, b, mut team, size)| {
                team.truncate(size);
                build(n, &u, &b, team)
            })
    })
}

/// Full models: the team is every assignment.
pub fn full_model(max: u32) -> impl Strategy<Value = DependenceModel> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n as usize),
            prop::collection::vec(any::<bool>(), (n * n) as usize),
        )
            .prop_map(move |(u, b)| build(n, &u, &b, all_assignments(n)))
    })
}

fn var() -> impl Strategy<Value = Var> {
    (0..2usize).prop_map(Var)
}

fn set() -> impl Strategy<Value = VarSet> {
    (0..4u32).prop_map(VarSet::from_bits)
}

/// Core formulas over `vocab()` of nesting depth at most `depth`.
pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        var().prop_map(|v| Formula::atom(PredId(0), [v])),
        (var(), var()).prop_map(|(a, b)| Formula::atom(PredId(1), [a, b])),
        (set(), var()).prop_map(|(x, y)| Formula::dep(x, y)),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (set(), inner).prop_map(|(x, f)| Formula::quant(x, f)),
        ]
    })
}
