//! End-to-end tests of the `obstruct` binary: golden script output, exit
//! codes, report shape and determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use obstruct_cli::report::{RunReport, SCHEMA};
use obstruct_cli::script::statements;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_obstruct"));
    c.env_remove("OBSTRUCT_BUDGET");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Runs with `--json`, validates the report against the published schema and parses it.
fn report(args: &[&str]) -> (i32, RunReport) {
    let mut full = args.to_vec();
    full.push("--json");
    let o = run(&full);
    let text = stdout(&o);
    let value: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    let schema: Value = serde_json::from_str(SCHEMA).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("report violates the schema: {msgs:?}\n{text}");
    }
    (code(&o), serde_json::from_value(value).unwrap())
}

#[test]
fn script_head_matches_golden() {
    let o = run(&["generate", "--format", "script"]);
    assert_eq!(code(&o), 0);
    let got = statements(&stdout(&o));
    let want = statements(&std::fs::read_to_string(fixture("golden/script_head_q.txt")).unwrap());
    assert_eq!(&got[..2], &want[..]);
    assert_eq!(got.len(), 1 + 128 + 3);
    assert_eq!(got[got.len() - 3..], ["ideal i=f(1..128);", "ideal si=std(i);", "si;"]);
}

#[test]
fn gf2_script_header() {
    let o = run(&["generate", "--format", "script", "--field", "gf:2"]);
    let got = statements(&stdout(&o));
    let want = statements(&std::fs::read_to_string(fixture("golden/script_head_gf2.txt")).unwrap());
    assert_eq!(got[0], want[0]);
}

#[test]
fn full_script_is_deterministic_and_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.sing");
    let b = dir.path().join("b.sing");
    for p in [&a, &b] {
        let o = run(&["generate", "--format", "script", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    let golden = std::fs::read_to_string(fixture("golden/script_q_dp.txt")).unwrap();
    assert_eq!(statements(&String::from_utf8(a).unwrap()), statements(&golden));
}

#[test]
fn internal_export_reproduces_the_bundled_listing() {
    let o = run(&["generate"]);
    assert_eq!(stdout(&o), obstruct::identity::APPENDIX_A);
}

#[test]
fn internal_export_roundtrips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.txt");
    let path = path.to_str().unwrap();
    assert_eq!(code(&run(&["generate", "--field", "gf:7", "--out", path])), 0);
    let (c, r) = report(&["verify-appendix", "--data", path]);
    assert_eq!(c, 0);
    assert_eq!(r.details["matched"], 128);
}

#[test]
fn verify_appendix_exit_codes() {
    let (c, r) = report(&["verify-appendix"]);
    assert_eq!(c, 0);
    assert_eq!(r.verdicts[0].verdict.as_deref(), Some("match"));
    assert_eq!(r.details["total"], 128);

    let dir = tempfile::tempdir().unwrap();
    let corrupt = dir.path().join("corrupt.txt");
    let text = obstruct::identity::APPENDIX_A.replacen("f5 = ", "f5 = 2*l8 + ", 1);
    std::fs::write(&corrupt, text).unwrap();
    let (c, r) = report(&["verify-appendix", "--data", corrupt.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert_eq!(r.details["matched"], 127);
    let diff = &r.details["mismatches"][0];
    assert_eq!(diff["index"], 5);
    assert_eq!(diff["difference"], "-2*l8");

    let o = run(&["verify-appendix", "--data", dir.path().join("absent.txt").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("reference data not found"));

    let truncated = dir.path().join("short.txt");
    std::fs::write(&truncated, "f1 = m5*m5 + m6*m1 + m7*l5 + m8*l1 - 1\n").unwrap();
    let (c, r) = report(&["verify-appendix", "--data", truncated.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert!(r.details["error"].as_str().unwrap().contains("expected 128"));
}

#[test]
fn check_gf2_is_unit() {
    let (c, r) = report(&["check", "--field", "gf:2"]);
    assert_eq!(c, 0);
    let e = &r.verdicts[0];
    assert_eq!(e.verdict.as_deref(), Some("UnitIdeal"));
    assert_eq!(e.basis_size, Some(1));
    assert_eq!(e.field.as_deref(), Some("gf:2"));
    let stats = e.stats.as_ref().unwrap();
    assert!(stats.skipped_product > 0 && stats.skipped_chain > 0);
}

#[test]
fn check_subsystem_is_proper() {
    let (c, r) = report(&["check", "--field", "gf:32003", "--subsystem", "1..32"]);
    assert_eq!(c, 0);
    assert_eq!(r.verdicts[0].verdict.as_deref(), Some("ProperIdeal"));
    assert_eq!(r.verdicts[0].label, "f1..f32");
    // Demanding the wrong verdict is a conformance failure.
    assert_eq!(code(&run(&["check", "--field", "gf:32003", "--subsystem", "1..32", "--expect", "unit"])), 1);
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    let (c, r) = report(&["check", "--field", "q", "--order", "lp", "--budget", "1"]);
    assert_eq!(c, 3);
    assert_eq!(r.verdicts[0].status, obstruct_cli::report::EntryStatus::BudgetExceeded);
    assert_eq!(r.verdicts[0].verdict, None);

    let o = bin().args(["check", "--field", "gf:3"]).env("OBSTRUCT_BUDGET", "0").output().unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn degree_bounded_certificate_search_reports_budget() {
    let (c, r) = report(&["check", "--field", "gf:2", "--cofactors", "--max-degree", "4"]);
    assert_eq!(c, 3);
    assert!(r.verdicts[0].stats.as_ref().unwrap().skipped_degree > 0);
    assert_eq!(r.details["certificates"], Value::Array(vec![]));
}

#[test]
fn bench_orders_always_lists_three_rows() {
    let (c, r) = report(&["bench-orders", "--budget-per-order", "0"]);
    assert_eq!(c, 0);
    let orders: Vec<_> = r.verdicts.iter().map(|e| e.order.clone().unwrap()).collect();
    assert_eq!(orders, ["dp", "Dp", "lp"]);
    assert!(r.verdicts.iter().all(|e| e.status == obstruct_cli::report::EntryStatus::BudgetExceeded));
    assert_eq!(r.details["fastest"], Value::Null);
}

#[test]
fn mini_case() {
    let o = run(&["mini", "--case", "commutative"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("root: lam = -1, lamp = -1"), "{text}");

    let (c, r) = report(&["mini", "--case", "commutative"]);
    assert_eq!(c, 0);
    assert_eq!(r.details["basis"], serde_json::json!(["lam + 1", "lamp + 1"]));
    assert_eq!(r.details["root"], serde_json::json!({"lam": "-1", "lamp": "-1"}));
    assert_eq!(r.details["inputs"], serde_json::json!(["lam - lamp", "lam^2 - 1", "lam^2 + lam"]));
    assert_eq!(r.verdicts[0].verdict.as_deref(), Some("ProperIdeal"));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    for args in [&["mini"][..], &["verify-appendix"][..], &["check", "--field", "gf:5", "--subsystem", "1..16"][..]] {
        let (_, a) = report(args);
        let (_, b) = report(args);
        assert_eq!(a.without_timings().to_json(), b.without_timings().to_json(), "{args:?}");
    }
}

#[test]
fn report_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let o = run(&["mini", "--report", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r.command, "mini");
    assert_eq!(r.artifacts, [path.display().to_string()]);
}

#[test]
fn basis_from_file() {
    let input = fixture("data/twisted_cubic.txt");
    let (c, r) = report(&["basis", "--input", input.to_str().unwrap(), "--order", "lp"]);
    assert_eq!(c, 0);
    assert_eq!(r.details["basis"], serde_json::json!(["x^2 - y", "x*y - z", "x*z - y^2", "y^3 - z^2"]));

    let input = fixture("data/inconsistent.txt");
    let (_, r) = report(&["basis", "--input", input.to_str().unwrap(), "--field", "gf:7"]);
    assert_eq!(r.verdicts[0].verdict.as_deref(), Some("UnitIdeal"));

    let (_, r) = report(&["basis", "--input", input.to_str().unwrap(), "--vars", "y,x", "--order", "lp"]);
    assert_eq!(r.details["variables"], serde_json::json!(["y", "x"]));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["check", "--field", "gf:4"][..],
        &["check", "--subsystem", "0..3"],
        &["check", "--order", "rp"],
        &["check", "--budget", "-1"],
        &["mini", "--case", "anticommutative"],
        &["frobnicate"],
        &["basis", "--input", "/definitely/not/here.txt"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}
