//! JSON file formats for vocabularies, models, structures, Herwig inputs
//! and relational models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use lfd_core::relational::RelationalModel;
use lfd_core::structure::{PartialMap, Perm, Relation, Structure};
use lfd_core::translate::FoStructure;
use lfd_core::types::TypeModel;
use lfd_core::{Assignment, DependenceModel, Obj, PredId, Var, VarSet, Vocabulary};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug)]
pub enum IoError {
    Read(String),
    Json(String),
    Format(String),
    Core(lfd_core::Error),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Read(m) => write!(f, "{m}"),
            IoError::Json(m) => write!(f, "malformed JSON: {m}"),
            IoError::Format(m) => write!(f, "{m}"),
            IoError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for IoError {}

impl From<lfd_core::Error> for IoError {
    fn from(e: lfd_core::Error) -> Self {
        IoError::Core(e)
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

pub type IoResult<T> = Result<T, IoError>;

pub fn read_file(path: &Path) -> IoResult<String> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read(format!("cannot read {}: {e}", path.display())))
}

fn format_err(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct VocabFile {
    pub variables: Vec<String>,
    pub predicates: BTreeMap<String, usize>,
}

impl VocabFile {
    pub fn from_vocab(v: &Vocabulary) -> Self {
        VocabFile {
            variables: v.variables().to_vec(),
            predicates: v.predicates().iter().cloned().collect(),
        }
    }

    pub fn to_vocab(&self) -> IoResult<Vocabulary> {
        Ok(Vocabulary::new(
            self.variables.clone(),
            self.predicates.iter().map(|(p, a)| (p.clone(), *a)).collect(),
        )?)
    }
}

pub fn parse_vocab(text: &str) -> IoResult<Vocabulary> {
    serde_json::from_str::<VocabFile>(text)?.to_vocab()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelFile {
    pub vocabulary: VocabFile,
    pub domain: Vec<String>,
    #[serde(default)]
    pub interpretation: BTreeMap<String, Vec<Vec<String>>>,
    pub team: Vec<BTreeMap<String, String>>,
}

fn object(domain: &[String], name: &str) -> IoResult<Obj> {
    domain
        .iter()
        .position(|d| d == name)
        .map(|i| Obj(i as u32))
        .ok_or_else(|| format_err(format!("`{name}` is not in the domain")))
}

fn interpretation_from(
    vocab: &Vocabulary,
    domain: &[String],
    table: &BTreeMap<String, Vec<Vec<String>>>,
) -> IoResult<Vec<BTreeSet<Vec<Obj>>>> {
    let mut out = vec![BTreeSet::new(); vocab.num_preds()];
    for (name, tuples) in table {
        let p = vocab
            .pred(name)
            .ok_or_else(|| format_err(format!("interpretation of undeclared predicate `{name}`")))?;
        for t in tuples {
            if t.len() != vocab.arity(p) {
                return Err(format_err(format!(
                    "tuple of length {} for `{name}` of arity {}",
                    t.len(),
                    vocab.arity(p)
                )));
            }
            out[p.0].insert(t.iter().map(|o| object(domain, o)).collect::<IoResult<Vec<_>>>()?);
        }
    }
    Ok(out)
}

fn interpretation_to(vocab: &Vocabulary, domain: &[String], rels: &[BTreeSet<Vec<Obj>>]) -> BTreeMap<String, Vec<Vec<String>>> {
    vocab
        .preds()
        .map(|p| {
            (
                vocab.pred_name(p).to_string(),
                rels[p.0]
                    .iter()
                    .map(|t| t.iter().map(|o| domain[o.index()].clone()).collect())
                    .collect(),
            )
        })
        .collect()
}

impl ModelFile {
    pub fn from_model(m: &DependenceModel) -> Self {
        ModelFile {
            vocabulary: VocabFile::from_vocab(&m.vocab),
            domain: m.domain.clone(),
            interpretation: interpretation_to(&m.vocab, &m.domain, &m.interpretation),
            team: m.team.iter().map(|s| assignment_to(&m.vocab, &m.domain, s)).collect(),
        }
    }

    pub fn to_model(&self) -> IoResult<DependenceModel> {
        let vocab = self.vocabulary.to_vocab()?;
        let interpretation = interpretation_from(&vocab, &self.domain, &self.interpretation)?;
        let team = self
            .team
            .iter()
            .map(|s| assignment_from(&vocab, &self.domain, s))
            .collect::<IoResult<Vec<_>>>()?;
        Ok(DependenceModel::new(vocab, self.domain.clone(), interpretation, team)?)
    }
}

pub fn assignment_to(vocab: &Vocabulary, domain: &[String], s: &Assignment) -> BTreeMap<String, String> {
    vocab
        .vars()
        .map(|v| (vocab.var_name(v).to_string(), domain[s.get(v).index()].clone()))
        .collect()
}

pub fn assignment_from(vocab: &Vocabulary, domain: &[String], s: &BTreeMap<String, String>) -> IoResult<Assignment> {
    if let Some(extra) = s.keys().find(|k| vocab.var(k).is_none()) {
        return Err(format_err(format!("assignment to undeclared variable `{extra}`")));
    }
    let values = vocab
        .vars()
        .map(|v| {
            let name = vocab.var_name(v);
            let o = s
                .get(name)
                .ok_or_else(|| format_err(format!("assignment leaves `{name}` undefined")))?;
            object(domain, o)
        })
        .collect::<IoResult<Vec<_>>>()?;
    Ok(Assignment(values))
}

pub fn parse_model(text: &str) -> IoResult<DependenceModel> {
    serde_json::from_str::<ModelFile>(text)?.to_model()
}

pub fn model_json(m: &DependenceModel) -> Value {
    serde_json::to_value(ModelFile::from_model(m)).expect("models serialize")
}

/// `T(𝕄)` with the team as the predicate `teamPredicate`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FoStructureFile {
    pub vocabulary: VocabFile,
    pub domain: Vec<String>,
    #[serde(default)]
    pub interpretation: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(rename = "teamPredicate")]
    pub team_predicate: Vec<Vec<String>>,
}

impl FoStructureFile {
    pub fn from_structure(s: &FoStructure) -> Self {
        FoStructureFile {
            vocabulary: VocabFile::from_vocab(&s.vocab),
            domain: s.domain.clone(),
            interpretation: interpretation_to(&s.vocab, &s.domain, &s.interpretation),
            team_predicate: s
                .team
                .iter()
                .map(|t| t.iter().map(|o| s.domain[o.index()].clone()).collect())
                .collect(),
        }
    }

    pub fn to_structure(&self) -> IoResult<FoStructure> {
        let vocab = self.vocabulary.to_vocab()?;
        let interpretation = interpretation_from(&vocab, &self.domain, &self.interpretation)?;
        let team = self
            .team_predicate
            .iter()
            .map(|t| t.iter().map(|o| object(&self.domain, o)).collect::<IoResult<Vec<_>>>())
            .collect::<IoResult<BTreeSet<_>>>()?;
        Ok(FoStructure {
            vocab,
            domain: self.domain.clone(),
            interpretation,
            team,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationFile {
    pub arity: usize,
    pub tuples: Vec<Vec<String>>,
}

/// A structure over an arbitrary relational signature.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StructureFile {
    pub domain: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationFile>,
}

impl StructureFile {
    pub fn from_structure(s: &Structure) -> Self {
        StructureFile {
            domain: s.domain.clone(),
            relations: s
                .relations
                .iter()
                .map(|(n, r)| {
                    (
                        n.clone(),
                        RelationFile {
                            arity: r.arity,
                            tuples: r
                                .tuples
                                .iter()
                                .map(|t| t.iter().map(|&a| s.domain[a as usize].clone()).collect())
                                .collect(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn to_structure(&self) -> IoResult<Structure> {
        let mut relations = BTreeMap::new();
        for (n, r) in &self.relations {
            let mut tuples = BTreeSet::new();
            for t in &r.tuples {
                if t.len() != r.arity {
                    return Err(format_err(format!("tuple of length {} in `{n}` of arity {}", t.len(), r.arity)));
                }
                tuples.insert(t.iter().map(|a| element(&self.domain, a)).collect::<IoResult<Vec<_>>>()?);
            }
            relations.insert(n.clone(), Relation { arity: r.arity, tuples });
        }
        let s = Structure {
            domain: self.domain.clone(),
            relations,
        };
        let report = s.validate();
        if !report.is_ok() {
            return Err(format_err(format!("invalid structure: {report}")));
        }
        Ok(s)
    }
}

fn element(domain: &[String], name: &str) -> IoResult<u32> {
    domain
        .iter()
        .position(|d| d == name)
        .map(|i| i as u32)
        .ok_or_else(|| format_err(format!("`{name}` is not an element")))
}

pub fn parse_structure(text: &str) -> IoResult<Structure> {
    serde_json::from_str::<StructureFile>(text)?.to_structure()
}

/// A partial map as `{"from": "to"}`, by element name.
pub fn partial_map_from(domain: &[String], m: &BTreeMap<String, String>) -> IoResult<PartialMap> {
    let pairs = m
        .iter()
        .map(|(a, b)| Ok((element(domain, a)?, element(domain, b)?)))
        .collect::<IoResult<Vec<_>>>()?;
    PartialMap::new(pairs).ok_or_else(|| format_err("partial map is not injective"))
}

pub fn partial_map_to(domain: &[String], p: &PartialMap) -> BTreeMap<String, String> {
    p.pairs()
        .iter()
        .map(|&(a, b)| (domain[a as usize].clone(), domain[b as usize].clone()))
        .collect()
}

/// One partial isomorphism of `C` and its chosen automorphism of `C⁺`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct HatEntry {
    pub p: BTreeMap<String, String>,
    pub hat: BTreeMap<String, String>,
}

pub fn parse_hats(text: &str, c: &Structure, cplus: &Structure) -> IoResult<(Vec<PartialMap>, Vec<Perm>)> {
    let entries: Vec<HatEntry> = serde_json::from_str(text)?;
    let mut ps = Vec::new();
    let mut hats = Vec::new();
    for e in entries {
        ps.push(partial_map_from(&c.domain, &e.p)?);
        let mut perm = vec![u32::MAX; cplus.size()];
        for (a, b) in &e.hat {
            perm[element(&cplus.domain, a)? as usize] = element(&cplus.domain, b)?;
        }
        if perm.contains(&u32::MAX) {
            return Err(format_err("an automorphism must be given on every element of the extension"));
        }
        hats.push(Perm(perm));
    }
    Ok((ps, hats))
}

pub fn hats_json(c: &Structure, cplus: &Structure, ps: &[PartialMap], hats: &[Perm]) -> Value {
    let entries: Vec<HatEntry> = ps
        .iter()
        .zip(hats)
        .map(|(p, h)| HatEntry {
            p: partial_map_to(&c.domain, p),
            hat: h
                .0
                .iter()
                .enumerate()
                .map(|(a, &b)| (cplus.domain[a].clone(), cplus.domain[b as usize].clone()))
                .collect(),
        })
        .collect();
    serde_json::to_value(entries).expect("hats serialize")
}

pub fn parse_partial_maps(text: &str, c: &Structure) -> IoResult<Vec<PartialMap>> {
    let maps: Vec<BTreeMap<String, String>> = serde_json::from_str(text)?;
    maps.iter().map(|m| partial_map_from(&c.domain, m)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationalFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<VocabFile>,
    pub states: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[usize; 2]>>,
    #[serde(default, rename = "depAtoms")]
    pub dep_atoms: BTreeMap<String, Vec<usize>>,
    #[serde(default, rename = "predAtoms")]
    pub pred_atoms: BTreeMap<String, Vec<usize>>,
}

/// `{x,y}`
fn parse_set(s: &str) -> IoResult<Vec<String>> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format_err(format!("`{s}` is not a variable set")))?;
    Ok(inner
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect())
}

/// `D({x},y)` into `({x}, y)`.
fn parse_dep_key(s: &str) -> IoResult<(Vec<String>, String)> {
    let bad = || format_err(format!("`{s}` is not a dependence atom D({{..}},y)"));
    let inner = s.trim().strip_prefix("D(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
    let close = inner.find('}').ok_or_else(bad)?;
    let set = parse_set(&inner[..=close])?;
    let y = inner[close + 1..].trim().strip_prefix(',').ok_or_else(bad)?.trim();
    if y.is_empty() {
        return Err(bad());
    }
    Ok((set, y.to_string()))
}

/// `P(x,y)` into `("P", [x, y])`.
fn parse_pred_key(s: &str) -> IoResult<(String, Vec<String>)> {
    let bad = || format_err(format!("`{s}` is not a predicate atom P(x,..)"));
    let open = s.find('(').ok_or_else(bad)?;
    let name = s[..open].trim();
    let args = s[open + 1..].trim().strip_suffix(')').ok_or_else(bad)?;
    let args: Vec<String> = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(String::from)
        .collect();
    if name.is_empty() {
        return Err(bad());
    }
    Ok((name.to_string(), args))
}

impl RelationalFile {
    pub fn from_model(r: &RelationalModel) -> Self {
        let v = &r.vocab;
        RelationalFile {
            vocabulary: Some(VocabFile::from_vocab(v)),
            states: r.states.clone(),
            relations: r
                .relations
                .iter()
                .map(|(x, rel)| (v.show_set(*x), rel.iter().map(|&(s, t)| [s, t]).collect()))
                .collect(),
            dep_atoms: r
                .dep_atoms
                .iter()
                .map(|((x, y), set)| (r.dep_name(*x, *y), set.iter().copied().collect()))
                .collect(),
            pred_atoms: r
                .pred_atoms
                .iter()
                .map(|((p, args), set)| (r.pred_name(*p, args), set.iter().copied().collect()))
                .collect(),
        }
    }

    /// Without a vocabulary, variables are collected from the keys in
    /// sorted order and predicate arities from their atoms.
    pub fn to_model(&self) -> IoResult<RelationalModel> {
        let vocab = match &self.vocabulary {
            Some(v) => v.to_vocab()?,
            None => self.infer_vocab()?,
        };
        let var = |name: &str| vocab.var(name).ok_or_else(|| format_err(format!("unknown variable `{name}`")));
        let set = |names: &[String]| names.iter().map(|n| var(n)).collect::<IoResult<VarSet>>();
        let mut relations = BTreeMap::new();
        for (k, pairs) in &self.relations {
            let x = set(&parse_set(k)?)?;
            relations.insert(x, pairs.iter().map(|p| (p[0], p[1])).collect());
        }
        let mut dep_atoms = BTreeMap::new();
        for (k, states) in &self.dep_atoms {
            let (xs, y) = parse_dep_key(k)?;
            dep_atoms.insert((set(&xs)?, var(&y)?), states.iter().copied().collect());
        }
        let mut pred_atoms = BTreeMap::new();
        for (k, states) in &self.pred_atoms {
            let (name, args) = parse_pred_key(k)?;
            let p: PredId = vocab.pred(&name).ok_or_else(|| format_err(format!("unknown predicate `{name}`")))?;
            if vocab.arity(p) != args.len() {
                return Err(format_err(format!("`{k}` does not match the arity of `{name}`")));
            }
            let args: Vec<Var> = args.iter().map(|a| var(a)).collect::<IoResult<_>>()?;
            pred_atoms.insert((p, args), states.iter().copied().collect());
        }
        let n = self.states.len();
        let out_of_range = relations
            .values()
            .flat_map(|r: &BTreeSet<(usize, usize)>| r.iter().flat_map(|&(s, t)| [s, t]))
            .chain(dep_atoms.values().flat_map(|s: &BTreeSet<usize>| s.iter().copied()))
            .chain(pred_atoms.values().flat_map(|s: &BTreeSet<usize>| s.iter().copied()))
            .any(|s| s >= n);
        if out_of_range {
            return Err(format_err("a state index is out of range"));
        }
        Ok(RelationalModel {
            vocab,
            states: self.states.clone(),
            relations,
            dep_atoms,
            pred_atoms,
        })
    }

    fn infer_vocab(&self) -> IoResult<Vocabulary> {
        let mut vars = BTreeSet::new();
        let mut preds: BTreeMap<String, usize> = BTreeMap::new();
        for k in self.relations.keys() {
            vars.extend(parse_set(k)?);
        }
        for k in self.dep_atoms.keys() {
            let (xs, y) = parse_dep_key(k)?;
            vars.extend(xs);
            vars.insert(y);
        }
        for k in self.pred_atoms.keys() {
            let (name, args) = parse_pred_key(k)?;
            if preds.get(&name).is_some_and(|&a| a != args.len()) {
                return Err(format_err(format!("`{name}` is used with two arities")));
            }
            preds.insert(name, args.len());
            vars.extend(args);
        }
        Ok(Vocabulary::new(vars.into_iter().collect(), preds.into_iter().collect())?)
    }
}

pub fn parse_relational(text: &str) -> IoResult<RelationalModel> {
    serde_json::from_str::<RelationalFile>(text)?.to_model()
}

pub fn relational_json(r: &RelationalModel) -> Value {
    serde_json::to_value(RelationalFile::from_model(r)).expect("relational models serialize")
}

/// Closure members as printed formulas and each type as member indices.
pub fn type_model_json(tm: &TypeModel, root: usize) -> Value {
    let psi = tm.closure();
    serde_json::json!({
        "closure": (0..psi.len()).map(|i| psi.show(i)).collect::<Vec<_>>(),
        "types": tm.types().iter().map(|t| t.members().collect::<Vec<_>>()).collect::<Vec<_>>(),
        "root": root,
    })
}
