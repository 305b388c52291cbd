use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbw-workbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (code, v)
}

#[test]
fn certify_sl2_with_lie_d2() {
    let (code, v) = json_run(&["certify", "--input", &fixture("sl2.json"), "--d2", "lie"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "pass");
    assert_eq!(
        v["result"]["conclusion"],
        "descending PBW-like property established; PBW at every specialization (linear φ)"
    );
    assert_eq!(v["presentation"]["n"], 3);
    assert_eq!(v["tool"]["name"], "pbw-workbench");
}

#[test]
fn pbw_strange_reports_defect() {
    let (code, v) = json_run(&["pbw", "--input", &fixture("strange.json"), "--at", "1", "--degree", "3"]);
    assert_eq!(code, 1);
    let r = &v["result"];
    assert_eq!(r["dims"], serde_json::json!([1, 3, 6, 12]));
    assert_eq!(r["expected"], serde_json::json!([1, 3, 6, 10]));
    assert_eq!(r["first_defect"], 3);
    assert_eq!(v["provenance"]["bounds"]["K"], 3);
}

#[test]
fn pbw_text_table() {
    let out = run(&["--format", "text", "pbw", "--input", &fixture("strange.json"), "--at", "1", "--degree", "3"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("3   12       10  defect +2"), "{s}");
    assert!(s.contains("[x1, x2] = -h*x2*x1"), "{s}");
}

#[test]
fn hilbert_is_an_alias() {
    let a = run(&["pbw", "--input", &fixture("sl2.json"), "--generic", "--degree", "4"]);
    let b = run(&["hilbert", "--input", &fixture("sl2.json"), "--generic", "--degree", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn derive_strange_potential() {
    let (code, v) = json_run(&["derive", "--input", &fixture("strange.json"), "--var", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["derivatives"][0]["display"], "-h*x3*x2");
}

#[test]
fn from_potential_matches_presentation_echo() {
    let (code, a) = json_run(&["from-potential", "--input", &fixture("strange.json")]);
    assert_eq!(code, 0);
    let (_, b) = json_run(&["validate", "--input", &fixture("strange.json")]);
    assert_eq!(a["presentation"], b["presentation"]);
    assert_eq!(b["result"]["source"], "potential");
}

#[test]
fn torsion_witness() {
    let (code, v) = json_run(&[
        "torsion",
        "--input",
        &fixture("strange.json"),
        "--element",
        &fixture("strange_element.json"),
        "--factor",
        "1-h",
        "--degree",
        "5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["outcome"], "witness");
    assert_eq!(v["result"]["nonmember_at"], "1");
}

#[test]
fn torsion_exit_codes() {
    let args = |f: &'static str, d: &'static str| {
        vec![
            "torsion".to_string(),
            "--input".into(),
            fixture("strange.json"),
            "--element".into(),
            fixture("strange_element.json"),
            "--factor".into(),
            f.into(),
            "--degree".into(),
            d.into(),
        ]
    };
    let a = args("1", "5");
    let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(1));
    let a = args("1-h", "3");
    let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn obstruction_reports_jacobiator() {
    let (code, v) = json_run(&["obstruction", "--input", &fixture("nonjacobi.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["hbar_order"], 2);
    let g = &v["result"]["generators"][0];
    assert_eq!(g["triple"], serde_json::json!([1, 2, 3]));
    assert_eq!(g["poly"], serde_json::json!([{"word": [3], "coeff": "-1"}]));
    let (code, _) = json_run(&["obstruction", "--input", &fixture("sl2.json")]);
    assert_eq!(code, 1);
}

#[test]
fn quadratic_fixture_shows_both_conditions() {
    let (code, v) = json_run(&["certify", "--input", &fixture("poisson_only.json")]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["poisson_condition"]["verdict"], "pass");
    assert_eq!(v["result"]["quadratic_condition"]["verdict"], "fail");
    assert_eq!(v["result"]["quadratic_condition"]["witness"]["indices"], serde_json::json!([1, 2, 3, 1, 3, 1]));
}

#[test]
fn custom_d2_file() {
    let (code, v) = json_run(&[
        "certify",
        "--input",
        &fixture("sl2.json"),
        "--d2",
        "custom",
        "--d2-file",
        &fixture("d2_default_n3.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["d2"], "custom");
}

#[test]
fn membership_codes() {
    let poly = fixture("commutator.json");
    let input = fixture("heisenberg.json");
    let (code, v) = json_run(&["member", "--input", &input, "--poly", &poly, "--degree", "3", "--at", "2"]);
    assert_eq!((code, v["result"]["member"].clone()), (0, Value::from("yes")));
    let (code, _) = json_run(&["member", "--input", &fixture("abelian.json"), "--poly", &poly, "--degree", "3", "--at", "2"]);
    assert_eq!(code, 1);
    let (code, _) = json_run(&["member", "--input", &input, "--poly", &poly, "--degree", "2", "--generic"]);
    assert_eq!(code, 2);
}

#[test]
fn input_errors_exit_3() {
    let out = run(&["validate", "--input", &fixture("broken.json")]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(run(&["certify", "--input", &fixture("sl2.json"), "--d2", "quadratic"]).status.code(), Some(3));
    assert_eq!(run(&["pbw", "--input", &fixture("cubic_phi.json"), "--at", "1", "--degree", "2"]).status.code(), Some(3));
    assert_eq!(run(&["pbw", "--input", &fixture("sl2.json"), "--degree", "2"]).status.code(), Some(3));
    assert_eq!(run(&["pbw", "--input", &fixture("sl2.json"), "--degree", "2", "--at", "x"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let a = run(&["selftest", "--seed", "9", "--samples", "20"]);
    let b = run(&["selftest", "--seed", "9", "--samples", "20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (_, v) = json_run(&["selftest", "--seed", "9", "--samples", "20"]);
    assert_eq!(v["provenance"]["seed"], 9);
}
