use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use modtwist_cli::Report;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modtwist"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

/// Run with `--json`, check the report round-trips, and return its outputs.
fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    let again: Report = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, again);
    report.outputs
}

fn temp_model(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn genus_examples() {
    assert!(stdout(&["genus", "5", "3"]).contains(": 3"));
    assert_eq!(json(&["genus", "5", "3"])["genus"]["genus"]["Exact"], 3);
    assert_eq!(json(&["genus", "4", "3", "--plus"])["genus"]["genus"]["Exact"], 0);
    assert_eq!(code(&["genus", "6", "3"]), 2);
    assert_eq!(code(&["genus", "5", "3", "--oracle"]), 0);
    assert_eq!(json(&["genus", "4", "5", "--plus", "--oracle"])["oracle_agrees"], true);
    assert_eq!(code(&["genus", "2", "3", "--plus"]), 2);
}

#[test]
fn structure_examples() {
    let r = json(&["structure", "2", "3"]);
    assert_eq!((r["structure"].as_str(), r["order"].as_u64()), (Some("FullPGL2"), Some(24)));
    let r = json(&["structure", "4", "3"]);
    assert_eq!(r["structure"], "DirectProduct");
    assert!(!r["central_involution"].is_null());
    let r = json(&["structure", "4", "5"]);
    assert_eq!((r["structure"].as_str(), r["order"].as_u64()), (Some("DirectProduct"), Some(120)));
    assert_eq!(code(&["structure", "3", "3"]), 2);
}

#[test]
fn scan_examples() {
    assert_eq!(json(&["scan", "--lemma"])["lemma_pairs"].as_array().unwrap().len(), 8);
    let low = json(&["scan", "--low-genus", "--max-n", "300", "--max-p", "13"]);
    let got: Vec<(u64, u64)> = low["low_genus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["n"].as_u64().unwrap(), x["p"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, vec![(2, 3), (4, 3)]);
    // (4,5) has pN = 20 and belongs to the filtered list
    assert_eq!(json(&["scan", "--lemma", "--max", "20"])["lemma_pairs"].as_array().unwrap().len(), 5);
}

#[test]
fn cusps_al_classify() {
    assert_eq!(json(&["cusps", "20"])["cusps"].as_array().unwrap().len(), 6);
    let r = json(&["al-fixed", "20", "4", "--oracle"]);
    assert_eq!((r["fixed_points"].as_u64(), r["oracle"].as_u64()), (Some(4), Some(4)));
    assert_eq!(r["quotient"]["genus"]["Exact"], 0);
    assert_eq!(code(&["al-fixed", "20", "3"]), 2);
    assert_eq!(json(&["classify", "4", "3"])["case"], "Cyclotomic");
    assert_eq!(json(&["classify", "3", "7"])["case"], "NonCyclotomic");
}

#[test]
fn twist_plan_surjective() {
    let r = json(&["twist-plan", "5", "3", &data("s4_noncyclotomic.toml")]);
    assert_eq!(r["curves"].as_array().unwrap().len(), 1);
    assert_eq!((r["bijective"].as_bool(), r["finiteness"].as_str()), (Some(true), Some("finite")));
    let r = json(&["twist-plan", "2", "3", &data("s4_noncyclotomic.toml")]);
    assert_eq!(r["finiteness"], "excluded case N=2, p=3");
    let r = json(&["twist-plan", "4", "3", &data("s4_cyclotomic.toml")]);
    assert_eq!(r["curves"].as_array().unwrap().len(), 2);
    assert_eq!(r["bijective"], true);
    assert_eq!(r["finiteness"], "possibly infinite (excluded case N=4, p=3)");
    assert_eq!(code(&["twist-plan", "5", "3", &data("s4_cyclotomic.toml")]), 5);
}

#[test]
fn twist_plan_trivial_rho() {
    let r = json(&["twist-plan", "4", "3", &data("trivial_rho.toml")]);
    assert_eq!(r["curves"].as_array().unwrap().len(), 2);
    assert_eq!(r["bijective"], false);
    assert_eq!(r["verdict"], "NontrivialOutsidePSL2");
    let r = json(&["twist-plan", "4", "3", &data("trivial_rho.toml"), "--k", "-1"]);
    assert_eq!(r["curves"].as_array().unwrap().len(), 4);
    assert!(r["curves"].as_array().unwrap().iter().all(|c| c["cocycle_valid"] == true));
    assert_eq!(code(&["twist-plan", "2", "3", &data("trivial_rho.toml")]), 5);
}

#[test]
fn model_errors() {
    let f = temp_model("p = 3\n[group\n");
    assert_eq!(code(&["twist-plan", "4", "3", f.path().to_str().unwrap()]), 2);
    // σ has order 2 but T has order 3
    let f = temp_model(
        "p = 3\n[group]\npermutations = { s = [1, 0] }\n[rho]\ns = [[1, 1], [0, 1]]\n[chi]\ns = 1\n",
    );
    let out = run(&["twist-plan", "4", "3", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stderr).unwrap().contains("rho not a homomorphism"));
    assert_eq!(code(&["centralizer", "/nonexistent/model.toml"]), 2);
}

#[test]
fn cocycle_and_centralizer() {
    let r = json(&["cocycle-check", "4", "3", &data("s4_cyclotomic.toml")]);
    assert_eq!(r["valid"], true);
    assert_eq!(r["values"].as_array().unwrap().len(), 24);
    assert_eq!(json(&["cocycle-check", "4", "3", &data("s4_cyclotomic.toml"), "--primed"])["valid"], true);
    assert_eq!(json(&["cocycle-check", "4", "3", &data("trivial_rho.toml"), "--k", "-1"])["valid"], true);
    assert_eq!(code(&["cocycle-check", "2", "3", &data("s4_noncyclotomic.toml"), "--primed"]), 2);
    let r = json(&["centralizer", &data("s4_cyclotomic.toml")]);
    assert_eq!((r["centralizer_order"].as_u64(), r["verdict"].as_str()), (Some(1), Some("Trivial")));
    assert_eq!(json(&["centralizer", &data("trivial_rho.toml")])["centralizer_order"], 24);
}

#[test]
fn selftest_exit_codes() {
    assert_eq!(code(&["selftest", "--quick"]), 0);
    assert_eq!(code(&["--seed", "7", "selftest", "--quick"]), 0);
    let out = run(&["selftest", "--quick", "--inject-fault", "class-number"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().lines().any(|l| l.starts_with("FAIL lemma-pairs")));
    let r = json(&["selftest", "--quick"]);
    assert_eq!(r["suites"].as_array().unwrap().len(), 11);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["genus", "x", "3"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}
