//! End-to-end tests of the `chl` binary: output formats and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn chl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = chl(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn table3_csv_matches_everywhere() {
    let o = chl(&["table3", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,params,cocompact,arithmetic,trace_field,match"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 23);
    assert!(rows.iter().all(|r| r.ends_with(",ok")));
    assert!(rows.iter().any(|r| r.starts_with("G28,\"(2,4)\",")));
}

#[test]
fn table3_json_round_trips_byte_for_byte() {
    let o = chl(&["table3", "--output", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["all_match"], serde_json::json!(true));
    let again = serde_json::to_string_pretty(&v).unwrap();
    assert_eq!(again.trim_end(), stdout(&o).trim_end());
}

#[test]
fn thread_count_does_not_change_output() {
    let one = chl(&["table3", "--output", "json", "--jobs", "1"]);
    let four = chl(&["table3", "--output", "json", "--jobs", "4"]);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn instantiate_g29_json() {
    let v = json(&["instantiate", "--family", "G29", "--p", "3", "--output", "json"]);
    assert_eq!(v["generators"].as_array().unwrap().len(), 4);
    assert_eq!(v["signature"], serde_json::json!([3, 1, 0]));
    assert_eq!(v["branch"], serde_json::json!("mu=1+i"));
}

#[test]
fn g34_chooses_the_h_plus_branch() {
    let v = json(&["instantiate", "--family", "G34", "--p", "3", "--output", "json"]);
    assert!(v["branch"].as_str().unwrap().starts_with("H+"));
}

#[test]
fn verdict_and_presentation() {
    let o = chl(&["verdict", "--family", "G30", "--p", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("arithmetic:   true"));
    let v = json(&["presentation", "--family", "G31", "--p", "3", "--output", "json"]);
    assert_eq!(v["holds"], serde_json::json!(true));
}

#[test]
fn strata_reports_the_cusp_orbit() {
    let o = chl(&["strata", "--family", "G29", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("L124"));
}

#[test]
fn cusp_outputs() {
    let o = chl(&["cusp", "--family", "G29", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("linear part order:   72"));
    assert!(text.contains("approx 1.73205080756888"));
    assert!(text.contains("diff:                none"));
    let v = json(&["cusp", "--family", "B4_34_DM", "--output", "json"]);
    assert_eq!(v["linear_part_order"], serde_json::json!(96));
}

#[test]
fn incommensurable_cusps() {
    let o = chl(&["incommensurable", "--a", "B4_34_DM", "--b", "G29:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("INCOMMENSURABLE"));
    let o = chl(&["incommensurable", "--a", "G29:3", "--b", "G29:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("NOT DISTINGUISHED"));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = chl(&["instantiate", "--family", "G23", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("metadata-only"));
    assert_eq!(chl(&["instantiate", "--family", "G29", "--p", "7"]).status.code(), Some(2));
    assert_eq!(chl(&["instantiate", "--family", "G29", "--p", "3", "--output", "csv"]).status.code(), Some(2));
    assert_eq!(chl(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn catalog_mismatch_exits_with_one() {
    let text = include_str!("../../core/data/catalog.json");
    let mut cat: serde_json::Value = serde_json::from_str(text).unwrap();
    let row = cat["table3"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|r| r["family"] == "G30")
        .unwrap();
    let flipped = !row["arithmetic"].as_bool().unwrap();
    row["arithmetic"] = serde_json::json!(flipped);
    let path: PathBuf = std::env::temp_dir().join(format!("chl-mismatch-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string(&cat).unwrap()).unwrap();
    let o = chl(&["table3", "--catalog", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("DIFF"));
}
