mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn confcheck(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_confcheck"));
    cmd.current_dir(common::fixtures()).args(args).env_remove("CONFCHECK_FIXTURE_ROOT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn golden(name: &str) -> String {
    String::from_utf8(common::read(&format!("golden/{name}"))).unwrap()
}

#[test]
fn lint_accepts_the_sans_bundle() {
    let out = confcheck(&["lint", "sans_bundle.xml"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"valid": true, "violations": []}));
}

#[test]
fn lint_reports_cycles() {
    let out = confcheck(&["lint", "cyclic_bundle.xml"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let report = stdout_json(&out);
    assert_eq!(report["valid"], false);
    assert!(report["violations"]
        .as_array()
        .unwrap()
        .contains(&json!({"subject": "TD_loop", "message": "cycle at r1"})));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle at r1"));
}

#[test]
fn missing_input_and_bad_usage_exit_3() {
    assert_eq!(confcheck(&["lint", "no_such_bundle.xml"], &[]).status.code(), Some(3));
    assert_eq!(confcheck(&["frobnicate"], &[]).status.code(), Some(3));
    assert_eq!(confcheck(&["plan", "--bundle", "sans_bundle.xml"], &[]).status.code(), Some(3));
}

#[test]
fn resolve_matches_golden() {
    let out = confcheck(
        &["resolve", "--datasource", "acme_ds.json", "--bundle", "sans_bundle.xml", "--target", "TD_sans"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("resolve_sans.json"));
}

#[test]
fn resolve_unknown_target_exits_3() {
    let out = confcheck(
        &["resolve", "--datasource", "acme_ds.json", "--bundle", "sans_bundle.xml", "--target", "TD_nope"],
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TD_nope"));
}

#[test]
fn resolve_without_matches_prints_no_groups() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"identifiers": ["x"], "properties": {"vendor": {"x": ["Nobody"]}}}"#).unwrap();
    let out = confcheck(
        &["resolve", "--datasource", empty.to_str().unwrap(), "--bundle", "sans_bundle.xml", "--target", "TD_sans"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["groups"], json!([]));
}

#[test]
fn plan_matches_golden() {
    let out = confcheck(
        &[
            "plan",
            "--datasource",
            "acme_ds.json",
            "acme_ds_ext.json",
            "--bundle",
            "sans_bundle.xml",
            "--collectors",
            "collectors.json",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("plan_sans.json"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UNPLANNED"));
}

fn scan(datasources: &[&str], fs_root: &Path, plan: Option<&str>) -> (Output, Value) {
    let server = common::start_config_server();
    let dir = tempfile::tempdir().unwrap();
    let adapters = dir.path().join("adapters.json");
    std::fs::write(&adapters, common::adapters_json(&server, fs_root)).unwrap();
    let report = dir.path().join("report.json");
    let mut args = vec!["scan", "--bundle", "sans_bundle.xml"];
    if let Some(plan) = plan {
        args.extend(["--plan", plan]);
    } else {
        args.push("--datasource");
        args.extend(datasources);
        args.extend(["--collectors", "collectors.json"]);
    }
    args.extend(["--adapters", adapters.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    let out = confcheck(&args, &[]);
    let written = std::fs::read(&report).map(|b| serde_json::from_slice(&b).unwrap()).unwrap_or(Value::Null);
    (out, written)
}

fn statuses(report: &Value) -> Vec<(String, String)> {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["system_test_id"].as_str().unwrap().to_string(), r["definition_status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn scan_reports_false_for_the_noncompliant_landscape() {
    let (out, report) = scan(&["acme_ds.json", "acme_ds_ext.json"], &common::fixture("fs"), None);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report["engine"], "confcheck 0.1.0");
    assert_eq!(
        statuses(&report),
        [("CD_sans#1", "true"), ("CD_sans#2", "false"), ("CD_sans#3", "error")].map(|(a, b)| (a.into(), b.into()))
    );
    assert_eq!(report["summary"], json!({"true": 1, "false": 1, "error": 1}));
    assert_eq!(stdout_json(&out)["exit_code"], 1);
    let unplanned = &report["results"][2]["mappings"][0];
    assert_eq!(unplanned["status"], "error");
    assert_eq!(unplanned["diagnostic"], "unplanned");
    let collected = &report["results"][0]["mappings"][0];
    assert_eq!(collected["items"], json!(["true"]));
}

#[test]
fn scan_of_a_compliant_landscape_exits_0() {
    let (out, report) = scan(
        &["acme_ds.json", "acme_ds_ext.json", "compliant/ds_w_c.json"],
        &common::fixture("compliant/fs"),
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report["summary"], json!({"true": 3, "false": 0, "error": 0}));
}

#[test]
fn fixture_root_variable_overrides_remap_root() {
    let server = common::start_config_server();
    let dir = tempfile::tempdir().unwrap();
    let adapters = dir.path().join("adapters.json");
    // points at the non-compliant tree; the variable redirects to the compliant one
    std::fs::write(&adapters, common::adapters_json(&server, &common::fixture("fs"))).unwrap();
    let report = dir.path().join("report.json");
    let out = confcheck(
        &[
            "scan",
            "--datasource",
            "acme_ds.json",
            "acme_ds_ext.json",
            "compliant/ds_w_c.json",
            "--bundle",
            "sans_bundle.xml",
            "--collectors",
            "collectors.json",
            "--adapters",
            adapters.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
        ],
        &[("CONFCHECK_FIXTURE_ROOT", &common::fixture("compliant/fs"))],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn scan_executes_a_manual_plan() {
    let (out, report) = scan(&[], &common::fixture("fs"), Some("manual_plan.json"));
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["group"], json!(["t2", "w_b"]));
    assert_eq!(results[0]["definition_status"], "false");
}
