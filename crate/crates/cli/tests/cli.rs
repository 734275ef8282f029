use std::io::Write;
use std::process::{Command, Output};

fn mhclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhclass"))
        .args(args)
        .env_remove("MHCLASS_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chi_of_projective_plane() {
    let o = mhclass(&["chi", "P2", "P3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("P2     1 - y + y^2"), "{s}");
    assert!(s.contains("1 - y + y^2 - y^3"), "{s}");
}

#[test]
fn chi_specialized_to_euler_characteristic() {
    let o = mhclass(&["chi", "nodal", "cusp", "--y=-1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["nodal"], serde_json::json!(["1"]));
    assert_eq!(v["cusp"], serde_json::json!(["2"]));
}

#[test]
fn classes_of_nodal_cubic() {
    let o = mhclass(&["classes", "nodal", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"]["MT_y"]["degree"], serde_json::json!(["0", "-1"]));
    assert_eq!(v["classes"]["FJ_y"]["degree"], serde_json::json!([]));
}

#[test]
fn milnor_reports_pass() {
    let o = mhclass(&["milnor"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("cuspidal cubic"));
    assert!(s.contains("1 - y"));
}

#[test]
fn classical_suite_only_at_minus_one() {
    let o = mhclass(&["check", "--y=-1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["id"], "milnor_corpus");
}

#[test]
fn single_check_runs() {
    let o = mhclass(&["check", "--only", "whitney", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("whitney"));
}

#[test]
fn order_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mhclass"))
        .args(["classes", "P1", "--transform", "hirzebruch", "--format", "json"])
        .env("MHCLASS_ORDER", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classes"]["T_y"]["degree"], serde_json::json!(["1", "-1"]));
}

#[test]
fn malformed_catalog_is_a_schema_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{{\n  \"spaces\": [\n    {{\"id\": 3}}\n  ]\n}}").unwrap();
    let o = mhclass(&["chi", "--catalog", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn wrong_corpus_oracle_fails_the_check() {
    let corpus = r#"[{"name": "nodal cubic", "space": "nodal", "ambient": [2], "multidegrees": [[3]],
        "singular_points": [{"label": "node", "milnor_number": 2}],
        "decomposition": [{"coefficient": 1, "chain": ["nu_nodal"]}, {"coefficient": -1, "chain": ["pt_nodal"]}]}]"#;
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(corpus.as_bytes()).unwrap();
    let o = mhclass(&["check", "--y=-1", "--corpus", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = mhclass(&["milnor", "--corpus", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments() {
    assert_eq!(mhclass(&["chi", "--y", "abc"]).status.code(), Some(2));
    assert_eq!(mhclass(&["chi", "nowhere"]).status.code(), Some(2));
    assert_eq!(mhclass(&["frobnicate"]).status.code(), Some(2));
}
