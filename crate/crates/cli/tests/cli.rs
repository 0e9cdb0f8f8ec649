use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lawless-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("LAWLESS_LAB_CACHE_DIR")
        .env_remove("LAWLESS_LAB_BUDGET_ELEMS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn minimal_schedule_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["schedule", "build", "--mode", "minimal", "--n", "5"], dir.path());
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["p"], serde_json::json!([0, 1, 4, 12, 33]));
    assert_eq!(v["q"], serde_json::json!([0, 2, 7, 20, 54]));
}

#[test]
fn explicit_law_holds_on_psl2_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["psl2", "is-law", "--p", "5", "--word", "explicit"], dir.path());
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["is_law"], true);
    assert_eq!(v["length"], 46);
    assert_eq!(v["checked_tuples"], 3600);
}

#[test]
fn commutator_is_not_a_law() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&lab(&["psl2", "is-law", "--p", "7", "--word", "xyXY"], dir.path()));
    assert_eq!(v["is_law"], false);
    assert!(v["witness"].is_array());
}

#[test]
fn tiny_audit_and_upper_bound() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("tiny.json");
    let s = s.to_str().unwrap();
    assert_eq!(code(&lab(&["schedule", "build", "--mode", "tiny", "--out", s], dir.path())), 0);

    let audit = lab(&["cert", "audit", "--schedule", s, "--n", "2", "--budget", "2"], dir.path());
    assert_eq!(code(&audit), 0);
    let v = json(&audit);
    assert_eq!(v["lower_audit"]["tuples_enumerated"], 1345);
    assert_eq!(v["lower_audit"]["all_vanished"], true);

    let upper = json(&lab(&["cert", "upper", "--schedule", s, "--n", "2"], dir.path()));
    assert_eq!(upper["upper"]["bound"], 14);
    assert_eq!(upper["upper"]["words_verified"], 16);
}

#[test]
fn audit_budget_too_large_for_gap() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("tiny.json");
    let s = s.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "tiny", "--out", s], dir.path());
    let out = lab(&["cert", "audit", "--schedule", s, "--n", "2", "--budget", "3"], dir.path());
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["error"], "bound_violated");
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(&["no-such-command"], dir.path())), 64);
    assert_eq!(code(&lab(&["psl2", "order", "--p", "7"], dir.path())), 64);
    let bad = lab(&["psl2", "order", "--p", "7", "--elem", "1,2"], dir.path());
    assert_eq!(code(&bad), 64);
    assert_eq!(json(&bad)["error"], "parse");
}

#[test]
fn failed_hypothesis_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["cert", "plan", "--f", "table:[1,3,2]", "--mode", "fast", "--n", "3"], dir.path());
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["status"], "failed");
    assert_eq!(v["error"], "hypothesis_failed");
}

#[test]
fn failed_constants_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("fast.json");
    let s = s.to_str().unwrap();
    let built = lab(&["schedule", "build", "--mode", "fast", "--f", "pow:1.5", "--n", "7", "--out", s], dir.path());
    assert_eq!(code(&built), 0);
    let args = ["cert", "constants", "--schedule", s, "--f", "pow:1.5", "--K", "1", "--m-max", "6", "--C"];
    let good: Vec<&str> = args.iter().copied().chain(["16900"]).collect();
    let bad: Vec<&str> = args.iter().copied().chain(["1"]).collect();
    assert_eq!(code(&lab(&good, dir.path())), 0);
    let out = lab(&bad, dir.path());
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["constants"]["ok"], false);
}

#[test]
fn schedule_check_flags_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let s = path.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "minimal", "--n", "5", "--out", s], dir.path());
    assert_eq!(code(&lab(&["schedule", "check", s], dir.path())), 0);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["q"][2] = 5.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let out = lab(&["schedule", "check", s], dir.path());
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["valid"], false);
}

#[test]
fn output_is_deterministic_with_sorted_keys() {
    let dir = tempfile::tempdir().unwrap();
    let run = || lab(&["--seed", "7", "cert", "plan", "--f", "pow:1.5", "--mode", "fast", "--n", "5"], dir.path()).stdout;
    let a = run();
    assert_eq!(a, run());
    let v: Value = serde_json::from_slice(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn not_rf_witness_on_custom_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("c.json");
    let s = s.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "custom", "--L", "1,2,16,32,64", "--out", s], dir.path());
    let v = json(&lab(&["cert", "not-rf", "--schedule", s, "--window", "4"], dir.path()));
    assert_eq!(v["level"], 3);
    assert_eq!(v["prime"], 53);
    assert_eq!(v["support"], serde_json::json!([7]));
}

#[test]
fn growth_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("tiny.json");
    let s = s.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "tiny", "--out", s], dir.path());
    let csv_path = dir.path().join("table.csv");
    let out = lab(
        &["cert", "table", "--schedule", s, "--budget", "2", "--out", csv_path.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][3], "14");
    assert!(rows[1][5].starts_with("vanished"));
}

#[test]
fn wreath_eval_reports_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("m.json");
    let s = s.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "minimal", "--n", "5", "--out", s], dir.path());
    let v = json(&lab(&["wreath", "eval", "--schedule", s, "--word", "ĝĥ", "--coord", "0"], dir.path()));
    assert_eq!(v["net_shift"], 0);
    assert_eq!(v["levels"], serde_json::json!([1]));
    let empty = json(&lab(&["wreath", "eval", "--schedule", s, "--word", "ĝĥ", "--coord", "-3"], dir.path()));
    assert_eq!(empty["value"], serde_json::json!([]));
}

#[test]
fn witness_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let s = dir.path().join("tiny.json");
    let s = s.to_str().unwrap();
    lab(&["schedule", "build", "--mode", "tiny", "--out", s], dir.path());
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_lawless-lab"))
            .args(["cert", "upper", "--schedule", s, "--n", "2"])
            .env("LAWLESS_LAB_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(code(&first), 0);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}
