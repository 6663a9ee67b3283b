use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nuca::schema::{load_rules, parse_json, to_pretty, RulesFile};
use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn nuca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nuca")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = nuca(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixture_rules_round_trip() {
    let p = fixture("moore_n1.json");
    let rules = load_rules(&p).unwrap();
    assert_eq!(rules.names(), ["f", "g"]);
    assert!(rules.is_linear());
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let emitted = serde_json::to_value(RulesFile::from_ruleset(&rules)).unwrap();
    assert_eq!(emitted, original);
}

#[test]
fn truncated_files_report_a_position() {
    let text = std::fs::read_to_string(fixture("moore_n1.json")).unwrap();
    let err = parse_json::<RulesFile>(Path::new("t.json"), &text[..text.len() / 2]).unwrap_err();
    assert!(err.to_string().contains("line"), "{err}");
}

#[test]
fn block_orphan() {
    let r = report(&["orphan", "--dist", path(&fixture("moore_block_n1.json")), "--max-width", "4"]);
    assert_eq!(r["orphan"]["domain"], json!([-1, 0]));
    assert_eq!(r["orphan"]["pattern"], json!([1, 0]));
    assert_eq!(r["orphan"]["verified"], json!(true));
}

#[test]
fn bounds_and_recurrence() {
    let r = report(&["bounds", "--kind", "moore_d", "--d", "1", "--s", "2", "--n", "1", "--r", "1"]);
    assert_eq!(r, json!({ "k": 3 }));
    let r = report(&["recurrence", "--dist", path(&fixture("aba.json"))]);
    assert_eq!(r, json!({ "verdict": "NonRecurrent", "witness": "B" }));
}

#[test]
fn exit_codes() {
    assert_eq!(nuca(&["orphan"]).status.code(), Some(2));
    assert_eq!(nuca(&["orphan", "--dist", "missing.json", "--max-width", "2"]).status.code(), Some(2));
    let over = nuca(&[
        "orphan",
        "--dist",
        path(&fixture("moore_block_n1.json")),
        "--max-width",
        "8",
        "--method",
        "exhaustive",
        "--budget",
        "10",
    ]);
    assert_eq!(over.status.code(), Some(3));
    // a template has no rules to analyze
    let no_rules = nuca(&["orphan", "--dist", path(&fixture("aba.json")), "--max-width", "2"]);
    assert_eq!(no_rules.status.code(), Some(2));
}

#[test]
fn constructed_files_reload() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&["construct", "myhill", "--n", "2", "--out-dir", path(dir.path())]);
    assert_eq!(r["witness"]["collision"]["verified"], json!(true));
    let dist = dir.path().join("dist.json");
    let again = report(&["preinj", "--dist", path(&dist), "--max-width", "3"]);
    assert_eq!(again["collision"]["verified"], json!(true));
    let rules_text = std::fs::read_to_string(dir.path().join("rules.json")).unwrap();
    let rules = load_rules(&dir.path().join("rules.json")).unwrap();
    assert_eq!(to_pretty(&RulesFile::from_ruleset(&rules)), rules_text);
}

#[test]
fn lift_from_a_template() {
    let r = report(&["construct", "lift", "--template", path(&fixture("aba.json")), "--family", "moore"]);
    assert_eq!(r["unique_word"], json!("BA"));
    assert_eq!(r["alphabet"], json!([2, 2]));
    assert_eq!(r["witness"]["orphan"]["verified"], json!(true));
}

#[test]
fn simulate_writes_a_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("st.pgm");
    let r = report(&[
        "simulate",
        "--dist",
        path(&fixture("gf_periodic.json")),
        "--config",
        path(&fixture("seed.json")),
        "--from",
        "-3",
        "--to",
        "3",
        "--steps",
        "2",
        "--pgm",
        path(&image),
    ]);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0], json!([0, 0, 0, 1, 0, 0, 0]));
    let text = std::fs::read_to_string(&image).unwrap();
    assert!(text.starts_with("P2\n7 3\n255\n0 0 0 255 0 0 0\n"));
}

#[test]
fn probe_flags_short_wraps() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = dir.path().join("g.json");
    std::fs::copy(fixture("moore_n1.json"), dir.path().join("moore_n1.json")).unwrap();
    std::fs::write(
        &uniform,
        r#"{"ruleset": "moore_n1.json", "kind": "eventually_periodic", "left": ["g"], "middle": ["g"], "right": ["g"], "middle_start": 0}"#,
    )
    .unwrap();
    let r = report(&["probe-surjunctivity", "--dist", path(&uniform), "--n-max", "2"]);
    let first = &r["entries"][0];
    assert_eq!(first["m"], json!(2));
    assert_eq!(first["status"], json!("seam_artifact"));
    assert_eq!(first["witness"], Value::Null);
}
