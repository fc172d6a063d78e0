use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn lfd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfd"))
        .current_dir(fixtures().join(".."))
        .env_remove("LFD_CAP_OVERRIDE")
        .args(args)
        .output()
        .expect("run lfd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn check_model_a_at_s3() {
    let o = lfd(&["check", "fixtures/model-a.json", "--at", "s3", "dep({x},y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");
    let o = lfd(&["check", "fixtures/model-a.json", "--at", "s1", "dep({x},y)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
    let o = lfd(&["check", "fixtures/model-a.json", "--at", r#"{"x":"b","y":"b"}"#, "P(x)"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_whole_team() {
    let o = lfd(&["--json", "check", "fixtures/model-a.json", "P(y) | !P(y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["everywhere"], true);
    let o = lfd(&["check", "fixtures/model-a.json", "P(x)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn sat_verdicts() {
    let o = lfd(&["sat", "P(x) & !P(x)"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "UNSAT");
    let o = lfd(&["sat", "E{}(P(x)) & D{}(!P(x))"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lfd(&["--json", "sat", "dep({x},y) & !dep({y},x)"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "SAT");
    assert!(v["typeModel"]["types"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(lfd(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lfd(&["check", "no-such-file.json", "P(x)"]).status.code(), Some(2));
    assert_eq!(lfd(&["check", "fixtures/model-a.json", "--at", "s9", "P(x)"]).status.code(), Some(2));
    assert_eq!(lfd(&["check", "fixtures/model-a.json", "P(x"]).status.code(), Some(2));
    assert_eq!(lfd(&["check", "fixtures/model-a.json", "Q(x)"]).status.code(), Some(2));
    assert_eq!(lfd(&["--help"]).status.code(), Some(0));
}

#[test]
fn bisim_compare_reports_costs() {
    let o = lfd(&["--json", "bisim", "fixtures/model-a.json", "fixtures/model-b.json", "--compare"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["agree"], true);
    assert_eq!(v["dependence"]["bisimilar"], true);
    assert_eq!(v["gp"]["bisimilar"], true);
    let dep = v["dependence"]["closureComputations"].as_u64().unwrap();
    let gp = v["gp"]["closureComputations"].as_u64().unwrap();
    assert!(dep <= gp);
    let o = lfd(&["bisim", "fixtures/model-a.json", "fixtures/model-a-empty-p.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lfd(&["bisim", "fixtures/model-a.json", "fixtures/model-b.json", "--kind", "inclusion"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn herwig_commands() {
    let o = lfd(&[
        "herwig-verify",
        "fixtures/herwig-1/c.json",
        "fixtures/herwig-1/cplus.json",
        "fixtures/herwig-1/hats.json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = lfd(&["--json", "herwig-search", "fixtures/herwig-1/c.json", "fixtures/herwig-1/ps.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["extension"]["domain"].as_array().unwrap().len(), 3);
    let o = lfd(&["herwig-search", "fixtures/herwig-1/c.json", "fixtures/herwig-1/ps.json", "--max-size", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lfd(&["herwig-search", "fixtures/herwig-1/c.json", "fixtures/herwig-1/ps.json", "--max-size", "6"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn searched_extension_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = lfd(&["--json", "herwig-search", "fixtures/herwig-1/c.json", "fixtures/herwig-1/ps.json"]);
    let v = json(&o);
    let ext = dir.path().join("ext.json");
    let hats = dir.path().join("hats.json");
    std::fs::write(&ext, v["extension"].to_string()).unwrap();
    std::fs::write(&hats, v["hats"].to_string()).unwrap();
    let o = lfd(&[
        "herwig-verify",
        "fixtures/herwig-1/c.json",
        ext.to_str().unwrap(),
        hats.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn relational_validation() {
    assert_eq!(lfd(&["relational-validate", "fixtures/two-state.json"]).status.code(), Some(0));
    let o = lfd(&["--json", "relational-validate", "--from-model", "fixtures/model-a.json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["ok"], true);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.json");
    std::fs::write(&path, v["model"].to_string()).unwrap();
    assert_eq!(lfd(&["relational-validate", path.to_str().unwrap()]).status.code(), Some(0));

    let broken = r#"{"states": ["a", "b", "c"],
        "relations": {"{}": [[0,0],[1,1],[2,2],[0,1],[1,0],[1,2],[2,1]], "{x}": [[0,0],[1,1],[2,2]]},
        "depAtoms": {}, "predAtoms": {}}"#;
    std::fs::write(&path, broken).unwrap();
    let o = lfd(&["--json", "relational-validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let conditions: Vec<&str> = v["issues"].as_array().unwrap().iter().filter_map(|i| i["condition"].as_str()).collect();
    assert!(conditions.contains(&"1"), "{conditions:?}");
}

#[test]
fn translation_output() {
    let o = lfd(&["translate", "dep({x},y)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("A("));
    let o = lfd(&["translate", "--tptp", "D{x} P(y)"]);
    assert!(stdout(&o).contains("=>"));
}

#[test]
fn unravel_and_cutoff() {
    let o = lfd(&["--json", "unravel", "dep({x},y) & !dep({y},x)", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["kTree"]["ok"], true);
    assert!(v["paths"].as_array().unwrap().iter().all(|p| p["length"].as_u64().unwrap() <= 2));
    let o = lfd(&["--json", "cutoff", "dep({x},y)", "--model", "fixtures/model-a.json", "--root", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["restrictedTruth"]["ok"], true);
    assert_eq!(lfd(&["unravel", "P(x) & !P(x)"]).status.code(), Some(2));
    assert_eq!(lfd(&["cutoff", "x = y"]).status.code(), Some(2));
}

#[test]
fn findmodel_and_pipeline() {
    let o = lfd(&["--json", "findmodel", "dep({x},y) & !dep({y},x)", "--max-domain", "2", "--max-team", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["found"], true);
    assert_eq!(lfd(&["findmodel", "P(x) & !P(x)"]).status.code(), Some(1));
    let o = lfd(&["--json", "pipeline-fmp", "D{x} P(y) & !dep({x},y)"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["verdict"], "SAT");
    assert_eq!(v["evidence"]["restrictedTruth"]["ok"], true);
    assert_eq!(lfd(&["pipeline-fmp", "P(x) & !P(x)"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--json", "pipeline-fmp", "R(x,y) & E{y} !R(x,y)"][..],
        &["--json", "cutoff", "dep({x},y) & !dep({y},x)"][..],
        &["--json", "bisim", "fixtures/model-a.json", "fixtures/model-b.json", "--compare"][..],
    ] {
        assert_eq!(lfd(args).stdout, lfd(args).stdout);
    }
}

#[test]
fn cap_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_lfd"))
        .env("LFD_CAP_OVERRIDE", "0")
        .args(["sat", "P(x)"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
