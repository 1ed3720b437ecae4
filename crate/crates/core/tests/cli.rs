//! End-to-end tests of the `gs` binary: exit codes, output schema,
//! determinism, and tolerance resolution.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gs(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gs"));
    cmd.args(args).env_remove("GS_DEFAULT_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    gs(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gs-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["shoot", "--d", "0"]).status.code(), Some(64));
    assert_eq!(run(&["shoot", "--d", "3", "--frob", "1"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["sweep", "--d", ""]).status.code(), Some(64));
    assert_eq!(run(&["classify", "--d", "3", "--u0", "-1"]).status.code(), Some(64));
}

#[test]
fn undetermined_classification_exits_3() {
    // horizon far too short to resolve the tail
    let out = run(&["classify", "--d", "3", "--u0", "1.0886", "--rmax", "0.01"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_verdict_lines() {
    let n = run(&["classify", "--d", "3", "--u0", "0.5"]);
    assert_eq!(n.status.code(), Some(0));
    assert!(stdout(&n).starts_with("N r0="), "got {:?}", stdout(&n));
    let p = run(&["classify", "--d", "3", "--u0", "50"]);
    assert!(stdout(&p).starts_with("P r1="));
    let c = run(&["classify", "--d", "6", "--u0", "1"]);
    assert!(stdout(&c).starts_with("CANDIDATE r_end="));
}

#[test]
fn shoot_writes_schema_stable_outputs() {
    let dir = tmpdir("schema");
    let base = dir.join("run");
    let out = run(&["shoot", "--d", "3", "--out", base.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("run.profile.csv")).unwrap();
    assert!(csv.starts_with("r,u,du,V,dV\n"));
    assert!(csv.lines().count() > 10);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("run.summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["command"], "shoot");
    assert_eq!(summary["d"], 3.0);
    assert_eq!(summary["exit"], 0);
    for key in ["abs_tol", "rel_tol", "r_start", "r_max", "u_floor", "event_tol", "u0_tol"] {
        assert!(summary["config"][key].is_number(), "missing config.{key}");
    }
    let results = &summary["results"];
    for key in ["u0_star", "v_infinity", "kappa"] {
        assert!(results[key]["value"].is_number(), "missing results.{key}.value");
        assert!(results[key]["tol"].is_number(), "missing results.{key}.tol");
    }
    assert!(results["particle_number"]["converged"].is_boolean());
    assert!(results["energy"]["total"]["value"].is_number());
    // no finite potential limit and no energy below d = 2
    let out2 = run(&["shoot", "--d", "1.5"]);
    let s2: serde_json::Value = serde_json::from_str(&stdout(&out2)).unwrap();
    assert_eq!(s2["results"]["v_infinity"]["divergent"], true);
    assert!(s2["results"]["energy"].is_null());
}

#[test]
fn identical_flags_identical_bytes() {
    let dir = tmpdir("det");
    for tag in ["a", "b"] {
        let base = dir.join(tag);
        let out = run(&["shoot", "--d", "4", "--out", base.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    for suffix in [".profile.csv", ".summary.json"] {
        let a = std::fs::read(dir.join(format!("a{suffix}"))).unwrap();
        let b = std::fs::read(dir.join(format!("b{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix} differs between identical runs");
    }
    let s1 = run(&["sweep", "--d", "3,6"]);
    let s2 = run(&["sweep", "--d", "3,6"]);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn env_tolerance_with_flag_override() {
    let read_cfg = |out: &Output| -> serde_json::Value {
        serde_json::from_str(&stdout(out)).unwrap()
    };
    let env = gs(&["shoot", "--d", "3"])
        .env("GS_DEFAULT_TOL", "1e-8")
        .output()
        .unwrap();
    let cfg = read_cfg(&env)["config"].clone();
    assert_eq!(cfg["abs_tol"], 1e-8);
    assert_eq!(cfg["rel_tol"], 1e-8);
    assert_eq!(cfg["u0_tol"], 1e-8);
    let flag = gs(&["shoot", "--d", "3", "--rel-tol", "1e-11", "--tol", "1e-7"])
        .env("GS_DEFAULT_TOL", "1e-8")
        .output()
        .unwrap();
    let cfg = read_cfg(&flag)["config"].clone();
    assert_eq!(cfg["abs_tol"], 1e-8);
    assert_eq!(cfg["rel_tol"], 1e-11);
    assert_eq!(cfg["u0_tol"], 1e-7);
    let bad = gs(&["shoot", "--d", "3"])
        .env("GS_DEFAULT_TOL", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn sweep_table_shape() {
    let out = run(&["sweep", "--d", "6,7,8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,u0_star,v_infinity,kappa,N,E,converged"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for (row, d) in rows.iter().zip([6.0, 7.0, 8.0]) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[0].parse::<f64>().unwrap(), d);
        let u0: f64 = cols[1].parse().unwrap();
        assert!((u0 - 1.0).abs() <= 1e-6, "d = {d}: u0_star = {u0}");
        // no finite particle number at or above d = 7
        assert_eq!(cols[6], "false");
    }
    let range = run(&["sweep", "--d", "3:5:1"]);
    let text = stdout(&range);
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "d6"],
        vec!["verify", "hls"],
        vec!["verify", "lyapunov", "--d", "3"],
        vec!["verify", "wronskian", "--d", "3"],
        vec!["verify", "milne", "--d", "7"],
        vec!["verify", "reduction", "--d", "8"],
        vec!["verify", "autonomous"],
    ] {
        let out = run(&args);
        let text = stdout(&out);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {text}");
        assert!(text.lines().all(|l| l.ends_with("PASS")), "{args:?}: {text}");
        assert!(text.contains("tol="), "{args:?} must report tolerances");
    }
}

#[test]
fn lane_emden_profile_and_first_zero() {
    let dir = tmpdir("le");
    let base = dir.join("le3");
    let out = run(&["lane-emden", "--d", "3", "--out", base.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("le3.summary.json")).unwrap())
            .unwrap();
    let zero = summary["results"]["first_zero"]["value"].as_f64().unwrap();
    assert!((zero - 4.3528745959).abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.join("le3.profile.csv")).unwrap();
    assert!(csv.starts_with("r,u,du,V,dV\n"));
}

#[test]
fn milne_table_on_stdout() {
    let out = run(&["milne", "--d", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("r,y,z,res_y,res_z\n"));
    assert!(text.lines().count() > 50);
}

#[test]
fn transform_reports_scaling() {
    let out = run(&["transform", "--d", "6", "--sigma", "2", "--gamma", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(s["results"]["omega"]["value"], 4.0);
    assert!(s["results"]["scaling_round_trip_error"].as_f64().unwrap() < 1e-12);
    assert!(s["results"]["log_round_trip_error"].as_f64().unwrap() < 1e-8);
}
