//! The `lfd` command line.
//!
//! Exit codes: 0 success or a true verdict, 1 a false verdict, 2 usage,
//! input or IO errors, 3 a resource cap.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lfd_core::bisim::{refine, BisimKind, BisimOptions, BisimRelation};
use lfd_core::fmp::{pipeline_fmp, FmpOptions, FmpResult};
use lfd_core::relational::{to_relational, validate_relational};
use lfd_core::structure::Structure;
use lfd_core::syntax::parse_formula_infer;
use lfd_core::translate::translate;
use lfd_core::types::{satisfiable_with_cap, SatResult, TypeModel, DEFAULT_POSITIVE_CAP};
use lfd_core::unravel::{
    bounded_model_search, check_restricted_truth_lemma, cutoff, expand_dependence_predicates,
    generate_partial_isos, search_herwig_extension, unravel, verify_herwig_extension, verify_k_tree,
    HerwigSearch, Unravelling, MODEL_BUDGET, SEARCH_BUDGET, TEAM_RELATION,
};
use lfd_core::{closure, parse_formula, DependenceModel, Error, Formula, Severity, ValidationReport, Vocabulary};

use crate::io::{self, IoError};

#[derive(Debug, Parser)]
#[command(name = "lfd", version, about = "Model checking, satisfiability and finite models for the logic of functional dependence")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Dependence,
    Gp,
    Inclusion,
}

impl From<KindArg> for BisimKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Dependence => BisimKind::Dependence,
            KindArg::Gp => BisimKind::Gp,
            KindArg::Inclusion => BisimKind::Inclusion,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and print it back with its free variables.
    Parse {
        formula: String,
        /// Vocabulary JSON; inferred from the formula when absent.
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Evaluate a formula on a dependence model.
    Check {
        model: PathBuf,
        formula: String,
        /// Team member as `sN` (1-based) or a JSON assignment.
        #[arg(long)]
        at: Option<String>,
    },
    /// Decide satisfiability by type elimination.
    Sat {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Compute the largest bisimulation between two models.
    Bisim {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "dependence")]
        kind: KindArg,
        /// Include equality atoms in atomic harmony.
        #[arg(long)]
        eq_atoms: bool,
        /// Run the dependence and GP checkers side by side.
        #[arg(long)]
        compare: bool,
    },
    /// First-order translation of a formula.
    Translate {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        tptp: bool,
    },
    /// Unravel a type model into good paths.
    Unravel {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Use the type model induced by this dependence model.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Index of the root type.
        #[arg(long)]
        root: Option<usize>,
    },
    /// The cut-off of the depth-3 unravelling with its checks.
    Cutoff {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        root: Option<usize>,
    },
    /// Check Herwig conditions (i)-(iii) for an extension.
    HerwigVerify {
        structure: PathBuf,
        extension: PathBuf,
        /// JSON list of `{"p": {..}, "hat": {..}}`.
        hats: PathBuf,
    },
    /// Search for a Herwig extension with few new elements.
    HerwigSearch {
        structure: PathBuf,
        /// JSON list of partial maps `{"a": "b"}`.
        maps: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
    /// Exhaustive search for a small model of a formula.
    Findmodel {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        #[arg(long, default_value_t = 4)]
        max_team: usize,
    },
    /// Validate a relational model.
    RelationalValidate {
        file: PathBuf,
        /// Only conditions (1)-(5).
        #[arg(long)]
        general: bool,
        /// Read a dependence model and convert it first.
        #[arg(long)]
        from_model: bool,
    },
    /// Satisfiability, unravelling, cut-off and search to a finite model.
    PipelineFmp {
        formula: String,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        #[arg(long, default_value_t = 4)]
        max_team: usize,
        #[arg(long)]
        no_herwig: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(IoError),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Io(IoError::Core(e))
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(IoError::Core(Error::ResourceCap(_))) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

/// What a command produced.
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

type CliResult = Result<Outcome, CliError>;

/// Resource bounds, raised by `LFD_CAP_OVERRIDE`.
#[derive(Debug, Clone, Copy)]
struct Caps {
    types: usize,
    search: usize,
    herwig: usize,
}

fn caps() -> Caps {
    match std::env::var("LFD_CAP_OVERRIDE").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) => Caps {
            types: n,
            search: usize::MAX,
            herwig: usize::MAX,
        },
        None => Caps {
            types: DEFAULT_POSITIVE_CAP,
            search: MODEL_BUDGET,
            herwig: SEARCH_BUDGET,
        },
    }
}

/// Parse arguments, run, print; returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match run(&cli.command) {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json output"))
            } else {
                write!(out, "{}", o.text)
            };
            o.code
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({ "error": e.to_string(), "code": e.code() }));
            }
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn run(cmd: &Command) -> CliResult {
    match cmd {
        Command::Parse { formula, vocab } => cmd_parse(formula, vocab.as_deref()),
        Command::Check { model, formula, at } => cmd_check(model, formula, at.as_deref()),
        Command::Sat { formula, vocab } => cmd_sat(formula, vocab.as_deref()),
        Command::Bisim {
            left,
            right,
            kind,
            eq_atoms,
            compare,
        } => cmd_bisim(left, right, (*kind).into(), *eq_atoms, *compare),
        Command::Translate { formula, vocab, tptp } => cmd_translate(formula, vocab.as_deref(), *tptp),
        Command::Unravel {
            formula,
            vocab,
            model,
            depth,
            root,
        } => cmd_unravel(formula, vocab.as_deref(), model.as_deref(), *depth, *root),
        Command::Cutoff {
            formula,
            vocab,
            model,
            root,
        } => cmd_cutoff(formula, vocab.as_deref(), model.as_deref(), *root),
        Command::HerwigVerify {
            structure,
            extension,
            hats,
        } => cmd_herwig_verify(structure, extension, hats),
        Command::HerwigSearch {
            structure,
            maps,
            max_size,
        } => cmd_herwig_search(structure, maps, *max_size),
        Command::Findmodel {
            formula,
            vocab,
            max_domain,
            max_team,
        } => cmd_findmodel(formula, vocab.as_deref(), *max_domain, *max_team),
        Command::RelationalValidate {
            file,
            general,
            from_model,
        } => cmd_relational(file, *general, *from_model),
        Command::PipelineFmp {
            formula,
            vocab,
            max_domain,
            max_team,
            no_herwig,
        } => cmd_fmp(formula, vocab.as_deref(), *max_domain, *max_team, !*no_herwig),
    }
}

fn formula_with(text: &str, vocab: Option<&Path>) -> Result<(Vocabulary, Formula), CliError> {
    match vocab {
        Some(p) => {
            let v = io::parse_vocab(&io::read_file(p)?)?;
            let f = parse_formula(text, &v)?;
            Ok((v, f))
        }
        None => Ok(parse_formula_infer(text)?),
    }
}

fn load_model(p: &Path) -> Result<DependenceModel, CliError> {
    Ok(io::parse_model(&io::read_file(p)?)?)
}

pub fn report_json(r: &ValidationReport) -> Value {
    json!({
        "ok": r.is_ok(),
        "issues": r.issues.iter().map(|i| json!({
            "severity": match i.severity { Severity::Warning => "warning", Severity::Violation => "violation" },
            "condition": i.condition,
            "detail": i.detail,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_parse(text: &str, vocab: Option<&Path>) -> CliResult {
    let (v, f) = formula_with(text, vocab)?;
    let printed = f.display(&v).to_string();
    let free = v.show_set(f.free_vars());
    Ok(Outcome {
        code: 0,
        text: format!("{printed}\nfree: {free}\nsize: {}\nmodal depth: {}\n", f.size(), f.modal_depth()),
        json: json!({
            "formula": printed,
            "free": f.free_vars().iter().map(|x| v.var_name(x)).collect::<Vec<_>>(),
            "size": f.size(),
            "modalDepth": f.modal_depth(),
            "core": f.is_core(),
            "vocabulary": io::VocabFile::from_vocab(&v),
        }),
    })
}

fn cmd_check(model: &Path, text: &str, at: Option<&str>) -> CliResult {
    let m = load_model(model)?;
    let f = parse_formula(text, &m.vocab)?;
    let table = m.table(&f)?;
    if let Some(at) = at {
        let s = resolve_assignment(&m, at)?;
        let v = table[s];
        return Ok(Outcome {
            code: if v { 0 } else { 1 },
            text: format!("{v}\n"),
            json: json!({ "assignment": format!("s{}", s + 1), "value": v }),
        });
    }
    let mut text = String::new();
    for (i, v) in table.iter().enumerate() {
        let _ = writeln!(text, "s{} {} {v}", i + 1, m.show_assignment(&m.team[i]));
    }
    let all = table.iter().all(|&b| b);
    Ok(Outcome {
        code: if all { 0 } else { 1 },
        text,
        json: json!({
            "values": table.iter().enumerate().map(|(i, v)| json!({ "assignment": format!("s{}", i + 1), "value": v })).collect::<Vec<_>>(),
            "everywhere": all,
        }),
    })
}

fn resolve_assignment(m: &DependenceModel, at: &str) -> Result<usize, CliError> {
    let at = at.trim();
    if let Some(n) = at.strip_prefix('s').and_then(|n| n.parse::<usize>().ok()) {
        if n == 0 || n > m.team.len() {
            return Err(CliError::Usage(format!("the team has {} members, no s{n}", m.team.len())));
        }
        return Ok(n - 1);
    }
    let map: std::collections::BTreeMap<String, String> =
        serde_json::from_str(at).map_err(|_| CliError::Usage(format!("`{at}` is neither sN nor a JSON assignment")))?;
    let s = io::assignment_from(&m.vocab, &m.domain, &map)?;
    Ok(m.team_index(&s).ok_or(Error::AssignmentNotInTeam)?)
}

fn cmd_sat(text: &str, vocab: Option<&Path>) -> CliResult {
    let (v, f) = formula_with(text, vocab)?;
    Ok(match satisfiable_with_cap(&f, &v, caps().types)? {
        SatResult::Sat { model, root } => Outcome {
            code: 0,
            text: format!("SAT\n{}", type_model_text(&model, root)),
            json: json!({ "verdict": "SAT", "typeModel": io::type_model_json(&model, root) }),
        },
        SatResult::Unsat => Outcome {
            code: 1,
            text: "UNSAT\n".into(),
            json: json!({ "verdict": "UNSAT" }),
        },
    })
}

fn type_model_text(tm: &TypeModel, root: usize) -> String {
    let psi = tm.closure();
    let mut s = String::new();
    let _ = writeln!(s, "closure ({} formulas):", psi.len());
    for i in 0..psi.len() {
        let _ = writeln!(s, "  {i:>3}  {}", psi.show(i));
    }
    for (i, t) in tm.types().iter().enumerate() {
        let members: Vec<String> = t.members().map(|m| m.to_string()).collect();
        let mark = if i == root { " (root)" } else { "" };
        let _ = writeln!(s, "T{i}{mark}: {{{}}}", members.join(","));
    }
    s
}

fn relation_json(z: &BisimRelation) -> Value {
    json!({
        "bisimilar": !z.is_empty(),
        "pairs": z.pairs.iter().map(|(a, b)| [format!("s{}", a + 1), format!("s{}", b + 1)]).collect::<Vec<_>>(),
        "closureComputations": z.stats.closure_computations,
        "evalCalls": z.stats.eval_calls,
        "rounds": z.stats.rounds,
        "initialPairs": z.stats.initial_pairs,
    })
}

fn relation_text(z: &BisimRelation) -> String {
    let pairs: Vec<String> = z.pairs.iter().map(|(a, b)| format!("(s{},s{})", a + 1, b + 1)).collect();
    format!(
        "{}: {}\n  pairs: {}\n  closure computations: {}\n",
        z.kind.name(),
        if z.is_empty() { "not bisimilar" } else { "bisimilar" },
        if pairs.is_empty() { "none".into() } else { pairs.join(" ") },
        z.stats.closure_computations
    )
}

fn cmd_bisim(left: &Path, right: &Path, kind: BisimKind, eq_atoms: bool, compare: bool) -> CliResult {
    let (a, b) = (load_model(left)?, load_model(right)?);
    let opts = BisimOptions { eq_atoms };
    if compare {
        let dep = refine(&a, &b, BisimKind::Dependence, opts)?;
        let gp = refine(&a, &b, BisimKind::Gp, opts)?;
        let agree = dep.is_empty() == gp.is_empty();
        return Ok(Outcome {
            code: if dep.is_empty() { 1 } else { 0 },
            text: format!("{}{}verdicts agree: {agree}\n", relation_text(&dep), relation_text(&gp)),
            json: json!({ "dependence": relation_json(&dep), "gp": relation_json(&gp), "agree": agree }),
        });
    }
    let z = refine(&a, &b, kind, opts)?;
    Ok(Outcome {
        code: if z.is_empty() { 1 } else { 0 },
        text: relation_text(&z),
        json: json!({ "kind": kind.name(), "relation": relation_json(&z) }),
    })
}

fn cmd_translate(text: &str, vocab: Option<&Path>, tptp: bool) -> CliResult {
    let (v, f) = formula_with(text, vocab)?;
    let t = translate(&f, &v)?;
    let printed = if tptp {
        t.tptp(&v).to_string()
    } else {
        t.display(&v).to_string()
    };
    Ok(Outcome {
        code: 0,
        text: format!("{printed}\n"),
        json: json!({ "translation": printed, "tptp": t.tptp(&v).to_string() }),
    })
}

/// The type model to unravel and its root type.
fn type_model_for(text: &str, vocab: Option<&Path>, model: Option<&Path>, root: Option<usize>) -> Result<(TypeModel, usize), CliError> {
    match model {
        Some(p) => {
            let m = load_model(p)?;
            let f = parse_formula(text, &m.vocab)?;
            let psi = closure(&f, &m.vocab)?;
            Ok((m.induced_type_model(&psi)?, root.unwrap_or(0)))
        }
        None => {
            let (v, f) = formula_with(text, vocab)?;
            match satisfiable_with_cap(&f, &v, caps().types)? {
                SatResult::Sat { model, root: r } => Ok((model, root.unwrap_or(r))),
                SatResult::Unsat => Err(CliError::Usage("the formula is unsatisfiable; there is nothing to unravel".into())),
            }
        }
    }
}

fn paths_json(u: &Unravelling) -> Value {
    let v = &u.model.vocab;
    Value::Array(
        u.paths
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({
                    "id": i,
                    "parent": p.parent,
                    "label": v.show_set(p.label),
                    "type": p.ty,
                    "length": p.len,
                    "assignment": format!("s{}", p.assignment + 1),
                })
            })
            .collect(),
    )
}

fn paths_text(u: &Unravelling) -> String {
    let mut s = String::new();
    for (i, p) in u.paths.iter().enumerate() {
        let _ = writeln!(
            s,
            "  {i:>4}  lh={}  {}  s{} {}",
            p.len,
            u.show_path(i),
            p.assignment + 1,
            u.model.show_assignment(&u.model.team[p.assignment])
        );
    }
    s
}

fn cmd_unravel(text: &str, vocab: Option<&Path>, model: Option<&Path>, depth: usize, root: Option<usize>) -> CliResult {
    let (tm, root) = type_model_for(text, vocab, model, root)?;
    let u = unravel(&tm, root, depth)?;
    let k = tm.closure().num_vars();
    let tree = verify_k_tree(&u.model, &u.parents(), &u.bags(), k);
    Ok(Outcome {
        code: 0,
        text: format!(
            "{} paths, {} objects, {} assignments, branching {}\nk-tree (k={k}): {tree}\npaths:\n{}",
            u.paths.len(),
            u.model.domain.len(),
            u.model.team.len(),
            u.max_branching(),
            paths_text(&u)
        ),
        json: json!({
            "typeModel": io::type_model_json(&tm, root),
            "model": io::model_json(&u.model),
            "paths": paths_json(&u),
            "kTree": report_json(&tree),
        }),
    })
}

fn cmd_cutoff(text: &str, vocab: Option<&Path>, model: Option<&Path>, root: Option<usize>) -> CliResult {
    let (tm, root) = type_model_for(text, vocab, model, root)?;
    let u = unravel(&tm, root, 3)?;
    let cut = cutoff(&u)?;
    let truth = check_restricted_truth_lemma(&cut);
    let ex = expand_dependence_predicates(&cut)?;
    let s = Structure::from_model(&ex.model, TEAM_RELATION);
    let isos = generate_partial_isos(&cut, &s)?;
    Ok(Outcome {
        code: if truth.is_ok() { 0 } else { 1 },
        text: format!(
            "cut-off: {} paths, {} objects, {} assignments\nrestricted truth lemma: {truth}\nexpanded vocabulary: {} predicates\npartial isomorphisms: {}\n",
            cut.paths.len(),
            cut.model.domain.len(),
            cut.model.team.len(),
            ex.model.vocab.num_preds(),
            isos.len()
        ),
        json: json!({
            "model": io::model_json(&cut.model),
            "paths": paths_json(&cut),
            "restrictedTruth": report_json(&truth),
            "expanded": io::model_json(&ex.model),
            "partialIsomorphisms": isos.iter().map(|(p, q)| json!({
                "path": p,
                "map": io::partial_map_to(&s.domain, q),
            })).collect::<Vec<_>>(),
        }),
    })
}

fn cmd_herwig_verify(c: &Path, cplus: &Path, hats: &Path) -> CliResult {
    let c = io::parse_structure(&io::read_file(c)?)?;
    let cplus = io::parse_structure(&io::read_file(cplus)?)?;
    let (ps, hats) = io::parse_hats(&io::read_file(hats)?, &c, &cplus)?;
    let r = verify_herwig_extension(&c, &ps, &cplus, &hats);
    Ok(Outcome {
        code: if r.is_ok() { 0 } else { 1 },
        text: format!("{r}\n"),
        json: report_json(&r),
    })
}

fn cmd_herwig_search(c: &Path, maps: &Path, max_size: usize) -> CliResult {
    let c = io::parse_structure(&io::read_file(c)?)?;
    let ps = io::parse_partial_maps(&io::read_file(maps)?, &c)?;
    Ok(match search_herwig_extension(&c, &ps, max_size, caps().herwig)? {
        HerwigSearch::Found { extension, hats } => {
            let sj = serde_json::to_value(io::StructureFile::from_structure(&extension)).expect("structure json");
            Outcome {
                code: 0,
                text: format!(
                    "found an extension with {} elements\n{}\n",
                    extension.size(),
                    serde_json::to_string_pretty(&sj).expect("json")
                ),
                json: json!({ "found": true, "extension": sj, "hats": io::hats_json(&c, &extension, &ps, &hats) }),
            }
        }
        HerwigSearch::NotFoundWithinSize => Outcome {
            code: 1,
            text: format!("no extension with at most {max_size} new elements\n"),
            json: json!({ "found": false }),
        },
    })
}

fn cmd_findmodel(text: &str, vocab: Option<&Path>, max_domain: usize, max_team: usize) -> CliResult {
    let (v, f) = formula_with(text, vocab)?;
    Ok(match bounded_model_search(&f, &v, max_domain, max_team, caps().search)? {
        Some((m, s)) => Outcome {
            code: 0,
            text: format!(
                "model found, true at s{}\n{}\n",
                s + 1,
                serde_json::to_string_pretty(&io::model_json(&m)).expect("json")
            ),
            json: json!({ "found": true, "model": io::model_json(&m), "assignment": format!("s{}", s + 1) }),
        },
        None => Outcome {
            code: 1,
            text: format!("no model with at most {max_domain} objects and {max_team} assignments\n"),
            json: json!({ "found": false }),
        },
    })
}

fn cmd_relational(file: &Path, general: bool, from_model: bool) -> CliResult {
    let text = io::read_file(file)?;
    let r = if from_model {
        to_relational(&io::parse_model(&text)?)?
    } else {
        io::parse_relational(&text)?
    };
    let rep = validate_relational(&r, !general);
    let mut json = report_json(&rep);
    json["standard"] = json!(!general);
    if from_model {
        json["model"] = io::relational_json(&r);
    }
    Ok(Outcome {
        code: if rep.is_ok() { 0 } else { 1 },
        text: format!("{rep}\n"),
        json,
    })
}

fn cmd_fmp(text: &str, vocab: Option<&Path>, max_domain: usize, max_team: usize, herwig: bool) -> CliResult {
    let (v, f) = formula_with(text, vocab)?;
    let c = caps();
    let opts = FmpOptions {
        max_domain,
        max_team,
        budget: c.search,
        type_cap: c.types,
        herwig,
    };
    Ok(match pipeline_fmp(&f, &v, opts)? {
        FmpResult::Unsat => Outcome {
            code: 1,
            text: "UNSAT\n".into(),
            json: json!({ "verdict": "UNSAT" }),
        },
        FmpResult::Model(cert) => {
            let mut text = format!(
                "finite model from stage `{}`, true at s{}\ntypes: {}, paths: {}, cut-off paths: {}, partial isomorphisms: {}\nrestricted truth lemma: {}\nwitness realizes the root type: {}\n",
                cert.stage.name(),
                cert.assignment + 1,
                cert.types,
                cert.paths,
                cert.cut_paths,
                cert.partial_isos,
                cert.restricted_truth,
                cert.matches_root_type
            );
            for n in &cert.notes {
                let _ = writeln!(text, "note: {n}");
            }
            let _ = writeln!(text, "{}", serde_json::to_string_pretty(&io::model_json(&cert.model)).expect("json"));
            Outcome {
                code: 0,
                text,
                json: json!({
                    "verdict": "SAT",
                    "stage": cert.stage.name(),
                    "model": io::model_json(&cert.model),
                    "assignment": format!("s{}", cert.assignment + 1),
                    "evidence": {
                        "types": cert.types,
                        "paths": cert.paths,
                        "cutPaths": cert.cut_paths,
                        "cutObjects": cert.cut_objects,
                        "partialIsomorphisms": cert.partial_isos,
                        "restrictedTruth": report_json(&cert.restricted_truth),
                        "witnessType": cert.witness_type,
                        "matchesRootType": cert.matches_root_type,
                    },
                    "notes": cert.notes,
                }),
            }
        }
    })
}
