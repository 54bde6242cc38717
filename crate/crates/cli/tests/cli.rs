use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use harvest_core::dp_causal::PolicyTable;
use serde_json::Value;
use tempfile::TempDir;

const SECTION6: &str = r#"{
  "snr": {"kind": "awgn", "mean": 10.0},
  "harvest": {"kind": "iid", "support": [0.0, 0.5, 1.0], "probs": [0.25, 0.5, 0.25]},
  "battery": {"initial": {"support": [0.0, 0.5, 1.0], "probs": [0.25, 0.5, 0.25]}, "capacity": "inf"}
}"#;

fn harvest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harvest"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_full_two_slot_fixture() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"K": 2, "B1": 0.5, "Bmax": "inf", "snr": [1.0, 1.0], "harvest": [1.5]}"#,
    );
    let out = dir.path().join("r.json");
    let o = harvest(&["solve-full", "--scenario", s(&sc), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("throughput_bits"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["transition_slots"], serde_json::json!([1, 2]));
}

#[test]
fn solve_full_single_slot() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"K": 1, "B1": 0.7, "Bmax": "inf", "snr": [2.0], "harvest": []}"#,
    );
    let o = harvest(&["solve-full", "--scenario", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["allocation"], serde_json::json!([0.7]));
}

#[test]
fn solve_full_finite_battery_needs_grid_step() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"K": 2, "B1": 2.0, "Bmax": 2.0, "snr": [0.5, 10.0], "harvest": [1.0]}"#,
    );
    assert_eq!(
        harvest(&["solve-full", "--scenario", s(&sc)]).status.code(),
        Some(2)
    );
    let o = harvest(&["solve-full", "--scenario", s(&sc), "--grid-step", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let t1 = r["allocation"][0].as_f64().unwrap();
    assert!((t1 - 1.0).abs() < 1e-3);
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let neg = write(
        &dir,
        "neg.json",
        r#"{"K": 2, "B1": 1, "Bmax": "inf", "snr": [1, 1], "harvest": [-0.5]}"#,
    );
    let o = harvest(&["solve-full", "--scenario", s(&neg)]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(&dir, "bad.json", "{\"K\": 2,\n \"B1\": oops}");
    let o = harvest(&["solve-full", "--scenario", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let missing = dir.path().join("nope.json");
    assert_eq!(
        harvest(&["solve-k2", "--scenario", s(&missing)])
            .status
            .code(),
        Some(2)
    );
    let out = dir.path().join("no-such-dir").join("r.json");
    assert_eq!(
        harvest(&["solve-full", "--scenario", s(&neg), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(harvest(&["solve-full"]).status.code(), Some(2));
}

#[test]
fn solve_k2_reports_mode() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"K": 2, "B1": 2.0, "Bmax": 2.0, "snr": [0.5, 10.0], "harvest": [1.0]}"#,
    );
    let o = harvest(&["solve-k2", "--scenario", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["mode"], "C");
    assert_eq!(r["t1"], 1.0);
    let three = write(
        &dir,
        "k3.json",
        r#"{"K": 3, "B1": 1, "Bmax": "inf", "snr": [1, 1, 1], "harvest": [0, 0]}"#,
    );
    assert_eq!(
        harvest(&["solve-k2", "--scenario", s(&three)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn build_policy_tables() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SECTION6);
    let one = dir.path().join("k1.json");
    assert_eq!(
        harvest(&[
            "build-policy",
            "--model",
            s(&model),
            "--K",
            "1",
            "--out",
            s(&one)
        ])
        .status
        .code(),
        Some(0)
    );
    let t = PolicyTable::load(&one).unwrap();
    let xs = t.grid.battery.points();
    assert_eq!(t.slice(1, 0, 0), &xs[..]);

    let two = dir.path().join("k2.json");
    assert_eq!(
        harvest(&[
            "build-policy",
            "--model",
            s(&model),
            "--K",
            "2",
            "--out",
            s(&two)
        ])
        .status
        .code(),
        Some(0)
    );
    let t = PolicyTable::load(&two).unwrap();
    for k in 1..=2 {
        for hi in 0..3 {
            assert!(t.slice(k, 0, hi).windows(2).all(|w| w[1] >= w[0] - 1e-9));
        }
    }
    let again = dir.path().join("k2b.json");
    harvest(&[
        "build-policy",
        "--model",
        s(&model),
        "--K",
        "2",
        "--out",
        s(&again),
    ]);
    assert_eq!(std::fs::read(&two).unwrap(), std::fs::read(&again).unwrap());

    let corrupt = write(
        &dir,
        "bad.json",
        &SECTION6.replace("0.25, 0.5, 0.25", "0.25, 0.5"),
    );
    let o = harvest(&[
        "build-policy",
        "--model",
        s(&corrupt),
        "--K",
        "2",
        "--out",
        s(&again),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SECTION6);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = harvest(&[
            "simulate",
            "--model",
            s(&model),
            "--K",
            "2",
            "--runs",
            "200",
            "--seed",
            "9",
            "--out",
            s(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("scheme,K,snr_db,runs,mean_bits_per_slot,std_err,seed")
    );
    assert_eq!(lines.count(), 4);
    let o = harvest(&["simulate", "--model", s(&model), "--K", "2", "--runs", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_with_stored_policy() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SECTION6);
    let table = dir.path().join("p.json");
    harvest(&[
        "build-policy",
        "--model",
        s(&model),
        "--K",
        "3",
        "--out",
        s(&table),
    ]);
    let base = [
        "simulate",
        "--model",
        s(&model),
        "--runs",
        "100",
        "--seed",
        "2",
        "--scheme",
        "causal-dp",
    ];
    let stored = harvest(&[&base[..], &["--K", "3", "--policy", s(&table)]].concat());
    let fresh = harvest(&[&base[..], &["--K", "3"]].concat());
    assert_eq!(stored.status.code(), Some(0));
    assert_eq!(stdout(&stored), stdout(&fresh));
    let wrong = harvest(&[&base[..], &["--K", "2", "--policy", s(&table)]].concat());
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn sweep_has_one_row_per_cell() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", SECTION6);
    let json = dir.path().join("s.json");
    let o = harvest(&[
        "sweep",
        "--model",
        s(&model),
        "--scheme",
        "half",
        "--K",
        "1,2,4",
        "--snr-db",
        "0,10,20",
        "--runs",
        "20",
        "--seed",
        "1",
        "--json",
        s(&json),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 10);
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 9);
    let o = harvest(&[
        "sweep",
        "--model",
        s(&model),
        "--scheme",
        "greedy",
        "--K",
        "1",
        "--snr-db",
        "0",
        "--runs",
        "2",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_random_instances() {
    let o = harvest(&["verify", "--instances", "30", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all within tolerance"));
}

#[test]
fn verify_single_scenario() {
    let dir = TempDir::new().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"K": 2, "B1": 2.0, "Bmax": 2.0, "snr": [0.5, 10.0], "harvest": [1.0]}"#,
    );
    let o = harvest(&["verify", "--scenario", s(&sc)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all within tolerance"));
}
