use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn martlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_martlat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO_POINT: &str = r#"{
  "martlat_schema": 1,
  "id": "two-point",
  "space": {"finite_dim": 2},
  "norm": "l1",
  "horizon": 2,
  "filtration": {"start": 1, "levels": [
    {"kind": "block", "head": [["1/2", "1/2"], ["1/2", "1/2"]], "period": 1},
    {"kind": "block", "head": [[1, 0], [0, 1]], "period": 1}
  ]},
  "martingales": {"x": {"terms": [{"prefix": [0, 0]}, {"prefix": [1, -1]}]}},
  "assertions": [
    {"kind": "martingale_valid", "martingale": "x"},
    {"kind": "norm_equals", "martingale": "x", "value": 2},
    {"kind": "regular_norm_equals", "martingale": "x", "value": 2}
  ]
}"#;

#[test]
fn demo_runs_every_builtin() {
    let list = martlat(&["list", "--format", "json"]);
    assert_eq!(code(&list), 0);
    let ids: Vec<String> = json(&list)
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids.len(), 7);
    for id in &ids {
        let o = martlat(&["demo", id]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).starts_with(&format!("scenario {id} ")));
    }
}

#[test]
fn json_report_for_the_l1_example() {
    let o = martlat(&["demo", "example-l1-unbounded", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["scenario"], "example-l1-unbounded");
    assert!(r["citation"].is_string());
    let outcomes = r["outcomes"].as_array().unwrap();
    assert!(outcomes.iter().all(|o| o["passed"] == true));
    assert!(outcomes.iter().any(|o| o["kind"] == "norm_greater"));
}

#[test]
fn validate_passes_and_fails_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", TWO_POINT);
    assert_eq!(code(&martlat(&["validate", &good])), 0);

    // perturb x_1 so that E_1 x_2 != x_1
    let bad = write(
        dir.path(),
        "bad.json",
        &TWO_POINT.replace("[0, 0]", "[\"1/4\", 0]"),
    );
    let o = martlat(&["validate", &bad, "--format", "json"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    let first = &r["outcomes"][0];
    assert_eq!(first["passed"], false);
    assert!(first["witness"].as_str().unwrap().contains("coordinate 1"));
}

#[test]
fn schema_errors_exit_two_with_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.json",
        &TWO_POINT.replace("[1, -1]", "[1, \"one\"]"),
    );
    let o = martlat(&["validate", &broken]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("martingales.x.terms[1].prefix[1]"), "{err}");

    assert_eq!(
        code(&martlat(&["validate", "/nonexistent/scenario.json"])),
        2
    );
    assert_eq!(code(&martlat(&["demo", "no-such-example"])), 2);
    let o = martlat(&["demo", "no-such-example", "--format", "json"]);
    assert!(json(&o)["error"]
        .as_str()
        .unwrap()
        .contains("unknown scenario"));
}

#[test]
fn modulus_and_regnorm_commands() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "two.json", TWO_POINT);
    let o = martlat(&["modulus", &file, "--format", "json"]);
    assert_eq!(code(&o), 0);
    let m = &json(&o)["moduli"][0];
    assert_eq!(m["certified"], true);
    let first = &m["modulus"]["terms"][0]["prefix"];
    assert_eq!(first, &serde_json::json!(["1", "1"]));

    let o = martlat(&["regnorm", &file, "--norm", "l1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "x: ‖X‖ = 2 (exact), ‖X‖_r = 2");
    let o = martlat(&["regnorm", &file, "--norm", "sup", "--format", "json"]);
    assert_eq!(json(&o)["results"][0]["regular_norm"], "1");
}

#[test]
fn banach_modulus_reports_the_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let exported = martlat(&["export", "example-banach-limit"]);
    assert_eq!(code(&exported), 0);
    let file = write(dir.path(), "banach.json", &stdout(&exported));
    let o = martlat(&["modulus", &file]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("mismatch: Krickeberg term 0 is"));
}

#[test]
fn horizon_flag_overrides_the_scenario() {
    let o = martlat(&[
        "demo",
        "example-halves",
        "--horizon",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert!(r["outcomes"][1]["detail"]
        .as_str()
        .unwrap()
        .ends_with("0..=9"));
}

#[test]
fn generate_is_deterministic_and_validates() {
    let args = [
        "generate",
        "--seed",
        "1",
        "--dim",
        "4",
        "--levels",
        "2",
        "--horizon",
        "3",
    ];
    let (a, b) = (martlat(&args), martlat(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "gen.json", &stdout(&a));
    assert_eq!(code(&martlat(&["validate", &file])), 0);
    assert_eq!(
        code(&martlat(&["generate", "--levels", "3", "--horizon", "2"])),
        2
    );
}

#[test]
fn suites_run_from_the_command_line() {
    let o = martlat(&[
        "suite",
        "lattice-axioms",
        "--count",
        "5",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = json(&o);
    assert_eq!(r["passed"], 5);
    assert!(r["controls"][0]["detail"]
        .as_str()
        .unwrap()
        .starts_with("failed as expected"));

    let o = martlat(&["suite", "fatou", "--count", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("hypothesis violated, skipped"));
    assert_eq!(code(&martlat(&["suite", "ideal", "--count", "0"])), 2);
}
