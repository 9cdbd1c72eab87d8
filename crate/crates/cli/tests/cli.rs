use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tangentcone"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn dims_for_nine_branches() {
    let out = run(&["dims", "-p", "9"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["dimA"], 21);
    assert_eq!(v["tau"], 12);
    assert_eq!(v["genericRank"], 9);
    assert_eq!(v["tauPrime"], 8);
}

#[test]
fn normal_form_with_one_entry() {
    let out = run(&["normal-form", "-p", "4", "--entries", "1,1:2"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["normalForm"]["form"], "expanded");
    assert_eq!(v["normalForm"]["poly"]["display"], "2*x^3*y + 3*x^2*y^2 + x*y^3");
}

#[test]
fn invariants_are_byte_identical_across_runs_and_threads() {
    let curve = data("curve.json");
    let c = curve.to_str().unwrap();
    let first = run(&["invariants", c, "--seed", "7"]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stdout));
    for threads in ["1", "3"] {
        let again = run(&["invariants", c, "--seed", "7", "--threads", threads]);
        assert_eq!(again.stdout, first.stdout);
    }
    let v = json_of(&first);
    assert_eq!(v["p"], 7);
    assert_eq!(v["crossRatios"].as_array().unwrap().len(), 4);
}

#[test]
fn prenormalize_reports_parameters() {
    let curve = data("curve.json");
    let out = run(&["prenormalize", curve.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["params"]["p"], 7);
    assert!(v["params"]["entries"]["2,2"].is_string());
}

#[test]
fn integrals_round_trip_through_verify() {
    let dir = std::env::temp_dir().join(format!("tangentcone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&["integrals", "-p", "8", "--first-line", "2,3,-1,1/2,5"]);
    assert_eq!(code(&out), 0);
    let mut doc = json_of(&out);
    assert_eq!(doc["tau"], 9);
    let good = dir.join("good.json");
    std::fs::write(&good, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = run(&["verify", good.to_str().unwrap()]);
    assert_eq!(code(&v), 0);
    assert_eq!(json_of(&v)["allAnnihilated"], true);

    // replace a level-2 ratio by a22 alone, which the Euler-type generator rescales
    let idx = doc["integrals"].as_array().unwrap().iter().position(|f| f["label"] == "a_2_3/a_2_2").unwrap();
    let poly = serde_json::json!({ "terms": [ { "coeff": "1", "monomial": { "a_2_2": 1 } } ] });
    let one = serde_json::json!({ "terms": [ { "coeff": "1", "monomial": {} } ] });
    doc["integrals"][idx]["projectivized"] = serde_json::json!({ "num": poly, "den": one });
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let v = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&v), 2);
    let r = json_of(&v);
    assert_eq!(r["allAnnihilated"], false);
    assert_eq!(r["integrals"][idx]["annihilated"], false);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn generators_and_rank() {
    let out = run(&["generators", "-p", "6", "--first-line", "2,-1,1/3"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let gens = v["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 6);
    assert_eq!(gens[0]["diagnostics"]["x00Ratio"], "-1/6");

    let out = run(&["rank", "-p", "8", "--points", "2", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["matchesExpected"], true);
}

#[test]
fn brackets_report_commuting_family() {
    let out = run(&["brackets", "-p", "6", "--first-line", "2,-1,1/3", "--points", "2"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["kappa"], "1/6");
    assert!(!v["commuting"].as_array().unwrap().is_empty());
}

#[test]
fn bad_input_exits_with_one_and_a_json_error() {
    let out = run(&["dims", "-p", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["kind"], "domain");

    let out = run(&["integrals", "-p", "7", "--first-line", "1,2"]);
    assert_eq!(code(&out), 1);

    let out = run(&["invariants", "/nonexistent/curve.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["kind"], "parse");

    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["error"]["kind"], "usage");
}

#[test]
fn pretty_and_compact_agree() {
    let a = json_of(&run(&["dims", "-p", "7"]));
    let b = json_of(&run(&["dims", "-p", "7", "--format", "pretty"]));
    assert_eq!(a, b);
}

#[test]
fn selftest_reports_every_criterion() {
    let out = run(&["selftest", "--seed", "11"]);
    let v = json_of(&out);
    let criteria = v["criteria"].as_array().unwrap();
    let ids: Vec<u64> = criteria.iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (1..=9).collect::<Vec<_>>());
    let all = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(v["passed"], all);
    assert_eq!(code(&out), if all { 0 } else { 2 });
    // the nine-branch fixtures at their stated first line are the only expected failures
    for c in criteria {
        let id = c["id"].as_u64().unwrap();
        if id != 3 && id != 6 {
            assert_eq!(c["passed"], true, "criterion {id}: {c}");
        }
    }
}

#[test]
fn generators_agree_with_the_jet_solver() {
    let out = run(&["generators", "-p", "6", "--first-line", "2,-1,1/3", "--truncation-cap", "48"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["jetCheck"]["agree"], true);
    let out = run(&["generators", "-p", "6", "--first-line", "2,-1,1/3", "--truncation-cap", "4"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json_of(&out)["error"]["kind"], "structural");
}
