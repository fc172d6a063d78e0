//! From a satisfiable formula to a finite dependence model: type model,
//! unravelling, cut-off, partial isomorphisms, and exhaustive search when
//! the cheaper stages do not produce a model.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::semantics::DependenceModel;
use crate::structure::{PartialMap, Structure};
use crate::syntax::{Formula, Vocabulary};
use crate::types::{satisfiable_with_cap, SatResult, DEFAULT_POSITIVE_CAP};
use crate::unravel::{
    bounded_model_search, check_restricted_truth_lemma, cutoff, expand_dependence_predicates,
    generate_partial_isos, lift_model, search_herwig_extension, unravel, HerwigSearch, SEARCH_BUDGET,
    TEAM_RELATION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FmpOptions {
    /// Bounds for the exhaustive fallback search.
    pub max_domain: usize,
    pub max_team: usize,
    /// Candidate budget of the fallback search.
    pub budget: usize,
    /// Type enumeration cap on non-negated closure members.
    pub type_cap: usize,
    /// Try a Herwig extension search when the cut-off structure is tiny.
    pub herwig: bool,
}

impl Default for FmpOptions {
    fn default() -> Self {
        FmpOptions {
            max_domain: 3,
            max_team: 4,
            budget: crate::unravel::MODEL_BUDGET,
            type_cap: DEFAULT_POSITIVE_CAP,
            herwig: true,
        }
    }
}

/// Which stage produced the finite model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmpStage {
    /// The cut-off model itself satisfies the formula at the root path.
    CutOff,
    /// A searched Herwig extension of the expanded cut-off.
    Herwig,
    /// Exhaustive search up to the configured bounds.
    Search,
}

impl FmpStage {
    pub fn name(self) -> &'static str {
        match self {
            FmpStage::CutOff => "cutoff",
            FmpStage::Herwig => "herwig",
            FmpStage::Search => "search",
        }
    }
}

/// A finite model of the formula together with what each stage produced.
#[derive(Debug, Clone)]
pub struct FmpCertificate {
    /// Over the caller's vocabulary.
    pub model: DependenceModel,
    pub assignment: usize,
    pub stage: FmpStage,
    pub types: usize,
    pub paths: usize,
    pub cut_paths: usize,
    pub cut_objects: usize,
    pub partial_isos: usize,
    pub restricted_truth: ValidationReport,
    /// Members of the closure set true at the witness, as printed formulas.
    pub witness_type: Vec<String>,
    /// The witness realizes exactly the root type of the type model.
    pub matches_root_type: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum FmpResult {
    Unsat,
    Model(FmpCertificate),
}

/// Run every stage for `phi` over `vocab`.
pub fn pipeline_fmp(phi: &Formula, vocab: &Vocabulary, opts: FmpOptions) -> Result<FmpResult> {
    phi.check(vocab)?;
    if !phi.is_core() {
        return Err(Error::UnsupportedAtom("the finite model pipeline needs a core formula".into()));
    }
    let SatResult::Sat { model: tm, root } = satisfiable_with_cap(phi, vocab, opts.type_cap)? else {
        return Ok(FmpResult::Unsat);
    };
    let psi = tm.closure();
    let local_phi = psi.localize(phi)?;
    let mut notes = Vec::new();

    let u = unravel(&tm, root, 3)?;
    let cut = cutoff(&u)?;
    let restricted_truth = check_restricted_truth_lemma(&cut);
    let ex = expand_dependence_predicates(&cut)?;
    let structure = Structure::from_model(&ex.model, TEAM_RELATION);
    let isos = generate_partial_isos(&cut, &structure)?;

    let root_assignment = cut.paths[0].assignment;
    let mut found: Option<(DependenceModel, usize, FmpStage)> = None;
    if cut.model.eval(root_assignment, &local_phi)? {
        found = Some((lift_model(&cut.model, vocab)?, root_assignment, FmpStage::CutOff));
    } else {
        notes.push(String::from("the cut-off does not satisfy the formula at the root path"));
    }

    if found.is_none() && opts.herwig {
        if structure.size() <= 4 {
            let ps: Vec<PartialMap> = isos.iter().map(|(_, p)| p.clone()).collect();
            match search_herwig_extension(&structure, &ps, 7 - structure.size(), SEARCH_BUDGET) {
                Ok(HerwigSearch::Found { extension, .. }) => {
                    if let Some((m, s)) = herwig_model(&extension, &cut.model, &local_phi)? {
                        found = Some((lift_model(&m, vocab)?, s, FmpStage::Herwig));
                    } else {
                        notes.push(String::from("the Herwig extension found does not satisfy the formula"));
                    }
                }
                Ok(HerwigSearch::NotFoundWithinSize) => notes.push(String::from("no Herwig extension within 7 elements")),
                Err(e) => notes.push(format!("Herwig search stopped: {e}")),
            }
        } else {
            notes.push(format!(
                "cut-off structure has {} elements; Herwig search skipped",
                structure.size()
            ));
        }
    }

    if found.is_none() {
        match bounded_model_search(phi, vocab, opts.max_domain, opts.max_team, opts.budget)? {
            Some((m, s)) => found = Some((m, s, FmpStage::Search)),
            None => {
                return Err(Error::ResourceCap(format!(
                    "no model with at most {} objects and {} assignments",
                    opts.max_domain, opts.max_team
                )))
            }
        }
    }
    let (model, assignment, stage) = found.expect("some stage produced a model");
    if !model.eval(assignment, phi)? {
        return Err(Error::InvalidModel("the produced model does not satisfy the formula".into()));
    }
    let local = lower(&model, psi.vocab())?;
    let witness = local.extract_type(assignment, psi)?;
    let witness_type = witness.members().map(|i| psi.show(i)).collect();
    let matches_root_type = witness == tm.types()[root];
    Ok(FmpResult::Model(FmpCertificate {
        model,
        assignment,
        stage,
        types: tm.types().len(),
        paths: u.paths.len(),
        cut_paths: cut.paths.len(),
        cut_objects: cut.model.domain.len(),
        partial_isos: isos.len(),
        restricted_truth,
        witness_type,
        matches_root_type,
        notes,
    }))
}

/// Restrict a model to a sub-vocabulary with the same team.
fn lower(m: &DependenceModel, vocab: &Vocabulary) -> Result<DependenceModel> {
    let vars = vocab
        .vars()
        .map(|v| m.vocab.map_var(vocab, v))
        .collect::<Result<Vec<_>>>()?;
    let preds = vocab
        .preds()
        .map(|p| m.vocab.map_pred(vocab, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(DependenceModel {
        vocab: vocab.clone(),
        domain: m.domain.clone(),
        interpretation: preds.iter().map(|p| m.interpretation[p.0].clone()).collect(),
        team: m.team.iter().map(|s| crate::semantics::Assignment(s.project(&vars))).collect(),
    })
}

/// Read a dependence model back from a `τ⁺ ∪ {A}` structure and look for
/// an assignment satisfying `phi`.
fn herwig_model(s: &Structure, cut: &DependenceModel, phi: &Formula) -> Result<Option<(DependenceModel, usize)>> {
    let vocab = cut.vocab.clone();
    let mut interpretation = Vec::new();
    for p in vocab.preds() {
        let rel = &s.relations[vocab.pred_name(p)];
        interpretation.push(
            rel.tuples
                .iter()
                .map(|t| t.iter().map(|&a| crate::semantics::Obj(a)).collect())
                .collect(),
        );
    }
    let team = s.relations[TEAM_RELATION]
        .tuples
        .iter()
        .map(|t| crate::semantics::Assignment(t.iter().map(|&a| crate::semantics::Obj(a)).collect()))
        .collect();
    let m = DependenceModel::new(vocab, s.domain.clone(), interpretation, team)?;
    let table = m.table(phi)?;
    Ok(table.iter().position(|&b| b).map(|i| (m, i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn run(text: &str) -> FmpResult {
        let v = Vocabulary::from_names(&["x", "y"], &[("P", 1), ("R", 2)]);
        let f = parse_formula(text, &v).unwrap();
        let out = pipeline_fmp(&f, &v, FmpOptions::default()).unwrap();
        if let FmpResult::Model(c) = &out {
            assert!(c.model.eval(c.assignment, &f).unwrap());
            assert_eq!(c.model.vocab, v);
            assert!(c.restricted_truth.is_empty());
        }
        out
    }

    #[test]
    fn unsat_stops_early() {
        assert!(matches!(run("P(x) & !P(x)"), FmpResult::Unsat));
    }

    #[test]
    fn produces_models() {
        for text in [
            "dep({x},y) & !dep({y},x)",
            "P(x) & E{} !P(x)",
            "D{x} P(y) & !dep({x},y)",
            "R(x,y) & E{y} !R(x,y)",
        ] {
            assert!(matches!(run(text), FmpResult::Model(_)), "{text}");
        }
    }

    #[test]
    fn rejects_equality() {
        let v = Vocabulary::from_names(&["x", "y"], &[]);
        let f = parse_formula("x = y", &v).unwrap();
        assert!(matches!(pipeline_fmp(&f, &v, FmpOptions::default()), Err(Error::UnsupportedAtom(_))));
    }
}
