use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamehodge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/analysis_report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["analyze", "x + y + x^-1*y^-1"])), 0);
    assert_eq!(code(&run(&["analyze", "x + y"])), 3);
    assert_eq!(code(&run(&["analyze", "x^2 + 2*x*y + y^2 + x^-1*y^-1"])), 4);
    assert_eq!(code(&run(&["analyze", "x + * y"])), 2);
    assert_eq!(code(&run(&["analyze", "3 + 4"])), 2);
    assert_eq!(code(&run(&["analyze", "x + y + x^-1*y^-1", "--budget", "1"])), 5);
    assert_eq!(code(&run(&["verify-local", "--ell", "1", "--e", "2", "--bounds", "-2,1,1,0"])), 5);
}

#[test]
fn reports_follow_the_schema() {
    let validator = schema();
    for expr in ["x + x^-1", "x^2 + x^-1", "x + y + x^-1*y^-1", "x^3*y + y^-2 + x^-1", "x^2*y^-1 + y^2 + x^-1*y^-1"] {
        let out = run(&["analyze", expr, "--json"]);
        assert_eq!(code(&out), 0, "{expr}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{expr}: {errors:?}");
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["status"], "verified");
    }
}

#[test]
fn force_stamps_the_report() {
    let out = run(&["analyze", "x^2 + 2*x*y + y^2 + x^-1*y^-1", "--force"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "unverified hypotheses");
    assert_eq!(v["hypotheses"]["nondegenerate"], false);
    assert_eq!(v["checks"]["volume_equals_mu"], false);
    assert!(schema().is_valid(&v));
}

#[test]
fn input_options() {
    let dir = std::env::temp_dir().join(format!("tamehodge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("mirror.txt");
    std::fs::write(&file, "u + v + u^-1*v^-1\n").unwrap();
    let out = run(&["analyze", "--file", file.to_str().unwrap(), "--vars", "v,u"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["input"]["variables"], serde_json::json!(["v", "u"]));
    assert_eq!(v["mu"], 3);
    std::fs::remove_dir_all(&dir).unwrap();

    let lex = run(&["analyze", "x^2 + y + x^-1*y^-1", "--order", "lex"]);
    let grevlex = run(&["analyze", "x^2 + y + x^-1*y^-1"]);
    let a: Value = serde_json::from_slice(&lex.stdout).unwrap();
    let b: Value = serde_json::from_slice(&grevlex.stdout).unwrap();
    assert_eq!(a["order"], "lex");
    assert_eq!(a["spectrum"], b["spectrum"]);
    assert_ne!(code(&run(&["analyze", "x", "--order", "deglex"])), 0);
}

#[test]
fn text_reports() {
    let out = run(&["analyze", "x + y + x^-1*y^-1", "--text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("K^2(0) = O(0) + O(1) + O(2)  degree 3"));
    assert!(text.contains("mu         3"));
    let out = run(&["catalog", "--text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("P1xP1") && l.contains("spectrum [0 1 1 2]")));
}

#[test]
fn verify_local_charts() {
    for args in [&["--ell", "1", "--e", "2"][..], &["--ell", "2", "--e", "1,2"][..]] {
        let mut all = vec!["verify-local"];
        all.extend_from_slice(args);
        let out = run(&all);
        assert_eq!(code(&out), 0, "{args:?}");
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    }
    let out = run(&["verify-local", "--ell", "2", "--e", "2"]);
    assert_ne!(code(&out), 0);
    let out = run(&["verify-local", "--e", "3", "--alpha", "1/3,2/3", "--p-max", "1", "--text"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().lines().skip(1).all(|l| l.starts_with("PASS")));
}

#[test]
fn catalog_json() {
    let out = run(&["catalog"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["P1", "P2", "P1xP1"]);
    assert!(v.as_array().unwrap().iter().all(|e| e["comparison"]["matched"] == true));
}
