use super::*;
use crate::semantics::tests::model_a;
use crate::structure::inverse_closure;
use crate::syntax::{closure, parse_formula};
use crate::types::{satisfiable, SatResult};

fn model_a_unravelling(text: &str, depth: usize) -> Unravelling {
    let m = model_a();
    let psi = closure(&parse_formula(text, &m.vocab).unwrap(), &m.vocab).unwrap();
    let tm = m.induced_type_model(&psi).unwrap();
    unravel(&tm, 0, depth).unwrap()
}

#[test]
fn root_gets_fresh_objects() {
    let u = model_a_unravelling("dep({x},y)", 1);
    assert_eq!(u.paths.len(), 1);
    assert_eq!(u.model.domain, ["p0.x", "p0.y"]);
    assert_eq!(u.origins, [(0, Var(0)), (0, Var(1))]);
}

#[test]
fn children_reuse_determined_values() {
    let u = model_a_unravelling("dep({x},y)", 2);
    let psi = u.type_model.closure();
    for (i, node) in u.paths.iter().enumerate().skip(1) {
        let parent = node.parent.unwrap();
        let keep = u.last(parent).dep_closure(psi, node.label);
        let (s, t) = (u.assignment(parent), u.assignment(i));
        for x in psi.relevant_vars().iter() {
            assert_eq!(keep.contains(x), s.get(x) == t.get(x), "path {}", u.show_path(i));
        }
        assert!(u.last(parent).sim(u.last(i), psi, node.label));
    }
}

#[test]
fn unravelling_is_a_k_tree() {
    for text in ["dep({x},y)", "P(x)", "D{x} P(y) & !dep({},y)"] {
        let u = model_a_unravelling(text, 3);
        let k = u.type_model.closure().num_vars();
        let r = verify_k_tree(&u.model, &u.parents(), &u.bags(), k);
        assert!(r.is_empty(), "{text}: {r}");
        assert!(u.model.validate().is_ok());
        let m = u.type_model.types().len();
        assert!(u.max_branching() <= (1 << k) * m);
    }
}

#[test]
fn k_tree_check_catches_broken_bags() {
    let u = model_a_unravelling("dep({x},y)", 2);
    let mut bags = u.bags();
    bags[0].clear();
    let r = verify_k_tree(&u.model, &u.parents(), &bags, 2);
    assert!(r.fails("ii"));
    let r = verify_k_tree(&u.model, &u.parents(), &u.bags(), 1);
    assert!(r.fails("width"));
}

#[test]
fn restricted_truth_lemma_on_cutoff() {
    for text in ["dep({x},y)", "P(x) & dep({y},x)", "D{x} P(y)"] {
        let u = model_a_unravelling(text, 3);
        let cut = cutoff(&u).unwrap();
        assert!(cut.paths.iter().all(|p| p.len <= 3));
        let r = check_restricted_truth_lemma(&cut);
        assert!(r.is_empty(), "{text}: {r}");
        let r = check_bounded_truth_lemma(&u);
        assert!(r.is_empty(), "{text}: {r}");
    }
}

#[test]
fn mutilated_cutoff_breaks_truth_lemma() {
    let u = model_a_unravelling("dep({x},y)", 3);
    let cut = cutoff(&u).unwrap();
    let mut failures = 0;
    for (i, node) in cut.paths.iter().enumerate() {
        if node.len != 2 {
            continue;
        }
        let children: Vec<usize> = (0..cut.paths.len()).filter(|&j| cut.paths[j].parent == Some(i)).collect();
        let broken = cut.without_paths(&children).unwrap();
        let r = check_restricted_truth_lemma(&broken);
        assert!(!r.fails("restricted-truth →"));
        if r.fails("restricted-truth ←") {
            failures += 1;
        }
    }
    assert!(failures > 0);
}

#[test]
fn expansion_and_partial_isos() {
    let u = model_a_unravelling("dep({x},y)", 3);
    let cut = cutoff(&u).unwrap();
    let ex = expand_dependence_predicates(&cut).unwrap();
    let k = cut.model.vocab.num_vars();
    assert_eq!(ex.model.vocab.num_preds(), cut.model.vocab.num_preds() + (1 << k) * k);
    assert!(ex.model.vocab.pred("R_x__y").is_some());
    assert_eq!(ex.model.vocab.arity(ex.model.vocab.pred("R__y").unwrap()), 0);
    let s = Structure::from_model(&ex.model, TEAM_RELATION);
    let isos = generate_partial_isos(&cut, &s).unwrap();
    assert_eq!(isos.len(), cut.paths.iter().filter(|p| p.len == 3).count());
    let maps: Vec<PartialMap> = isos.into_iter().map(|(_, p)| p).collect();
    if let Some(all) = inverse_closure(&maps, 20_000) {
        assert!(all.iter().all(|q| q.is_partial_iso(&s)));
    }
}

#[test]
fn path_lemma_holds_for_generators() {
    let u = model_a_unravelling("dep({x},y)", 3);
    let cut = cutoff(&u).unwrap();
    let ex = expand_dependence_predicates(&cut).unwrap();
    let s = Structure::from_model(&ex.model, TEAM_RELATION);
    let maps: Vec<PartialMap> = generate_partial_isos(&cut, &s).unwrap().into_iter().map(|(_, p)| p).collect();
    let inverses: Vec<PartialMap> = maps.iter().map(PartialMap::inverse).collect();
    let r = check_path_lemma(&cut, maps.iter().chain(&inverses));
    assert!(r.is_empty(), "{r}");
}

#[test]
fn path_lemma_on_inverse_closure() {
    let u = model_a_unravelling("dep({x},y)", 3);
    let cut = cutoff(&u).unwrap();
    let ex = expand_dependence_predicates(&cut).unwrap();
    let s = Structure::from_model(&ex.model, TEAM_RELATION);
    let maps: Vec<PartialMap> = generate_partial_isos(&cut, &s).unwrap().into_iter().map(|(_, p)| p).collect();
    let Some(all) = inverse_closure(&maps, 20_000) else { return };
    let k = cut.model.vocab.num_vars();
    let (total, partial): (Vec<&PartialMap>, Vec<&PartialMap>) = all.iter().partition(|q| q.len() >= k);
    assert!(check_path_lemma(&cut, total.iter().copied()).is_empty());
    // maps defined on fewer than k objects have no total pair to offer
    assert!(!check_path_lemma(&cut, partial.iter().copied()).is_empty());
}

#[test]
fn unravel_satisfiability_witness() {
    let v = Vocabulary::from_names(&["x", "y"], &[("P", 1)]);
    let f = parse_formula("dep({x},y) & !dep({y},x)", &v).unwrap();
    let SatResult::Sat { model, root } = satisfiable(&f, &v).unwrap() else { panic!() };
    let u = unravel(&model, root, 3).unwrap();
    let cut = cutoff(&u).unwrap();
    assert!(check_restricted_truth_lemma(&cut).is_empty());
    let g = model.closure().localize(&f).unwrap();
    assert!(cut.model.eval(cut.paths[0].assignment, &g).unwrap());
}

#[test]
fn rejects_bad_arguments() {
    let u = model_a_unravelling("dep({x},y)", 2);
    assert!(cutoff(&u).is_err());
    assert!(unravel(&u.type_model, 99, 2).is_err());
    assert!(unravel(&u.type_model, 0, 0).is_err());
}
