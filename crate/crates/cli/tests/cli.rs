use std::path::PathBuf;
use std::process::{Command, Output};

use loglift::field::Field;
use loglift::io::{module_to_json, parse_module, CapPolicy};
use loglift::modules::breuil_module;
use serde_json::Value;

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_str().unwrap().to_owned()
}

fn loglift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loglift")).args(args).env_remove("LOGLIFT_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn breuil_example_gives_the_branch_above_the_diagonal() {
    let o = loglift(&["example", "breuil", "--L", "2 + O(5^10)", "--k", "2", "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["name"], "diag(p, 1)");
    assert_eq!(row["lift"], serde_json::json!([[1, "2 + O(5^10)"], [0, 1]]));
}

#[test]
fn schraen_example_matches_closed_form() {
    let o = loglift(&["example", "schraen", "--L", "117", "--Lp", "118", "--p", "7", "--json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r["agrees"], true);
        assert_eq!(r["computed"], r["closed_form"]);
    }
}

#[test]
fn bad_module_fails_check_with_violations() {
    let o = loglift(&["check", "--module", &data("bad.json")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL lie-homomorphism"), "{out}");
    assert!(out.contains("phi([e_1_1, e_1_2])"), "{out}");
}

#[test]
fn check_json_is_machine_readable() {
    let o = loglift(&["check", "--module", &data("schraen.json"), "--log", &data("schraen_log.json"), "--samples", "5", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["report"]["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"homomorphism") && names.contains(&"dgh-compatibility"));
}

#[test]
fn shipped_examples_pass_every_check() {
    for (m, l) in [("breuil.json", "breuil_log.json"), ("standard_gl3_21.json", "log_gl3.json")] {
        let o = loglift(&["check", "--module", &data(m), "--log", &data(l), "--samples", "10"]);
        assert!(o.status.success(), "{m}: {}", stdout(&o));
    }
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let args =
        ["check", "--module", &data("standard_gl3_21.json"), "--log", &data("log_gl3.json"), "--samples", "5", "--seed", "7", "--json"];
    assert_eq!(stdout(&loglift(&args)), stdout(&loglift(&args)));
}

#[test]
fn non_prime_field_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"n": 1, "field": {"p": 4}, "dim": 1, "action": {}}"#).unwrap();
    let o = loglift(&["weights", "--module", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field.p"), "{}", stderr(&o));
}

#[test]
fn malformed_json_reports_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, "{\n  \"n\": 1,\n  \"dim\": oops\n}").unwrap();
    let o = loglift(&["weights", "--module", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn trivial_module_has_one_weight() {
    let o = loglift(&["weights", "--module", &data("trivial.json"), "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 1);
    assert_eq!(v["components"][0]["weight"], serde_json::json!([0]));
}

#[test]
fn shipped_breuil_file_is_the_builtin_module() {
    let text = std::fs::read_to_string(data("breuil.json")).unwrap();
    let m = parse_module(&text, CapPolicy::default()).unwrap();
    let f = Field::qp(5, 20).unwrap();
    let builtin = breuil_module(&f);
    assert_eq!(m.explicit_action(), builtin.explicit_action());
    let again = parse_module(&module_to_json(&m, Some("breuil")), CapPolicy::default()).unwrap();
    assert_eq!(again.explicit_action(), m.explicit_action());
}

#[test]
fn cap_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_loglift")).args(["example", "breuil", "--L", "3"]).env("LOGLIFT_CAP", "8").output().unwrap();
    assert!(stdout(&o).contains("O(5^8)"), "{}", stdout(&o));
    let forced = loglift(&["weights", "--module", &data("breuil.json"), "--projectors", "--cap", "6"]);
    assert!(stdout(&forced).contains("O(5^6)"));
}

#[test]
fn gl3_verma_has_kostant_multiplicity_two() {
    let o = loglift(&["verma", "--module", &data("character_gl3.json"), "--depth", "2", "--weights", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 10);
    let w = v["weights"].as_array().unwrap().iter().find(|w| w["weight"] == serde_json::json!([1, 0, -2])).unwrap();
    assert_eq!(w["multiplicity"], 2);
}

#[test]
fn lift_of_diag_p_one() {
    let o = loglift(&[
        "lift",
        "--module",
        &data("breuil.json"),
        "--log",
        &data("breuil_log.json"),
        "--element",
        &data("element_diag_p_1.json"),
        "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lift"][0][1], "2 + O(5^10)");
}
