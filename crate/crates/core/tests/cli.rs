use std::path::Path;
use std::process::Command;

use serde_json::Value;

/// Runs the binary in `dir`; returns (exit code, parsed summary line).
fn run(dir: &Path, args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_bealab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    let summary = match lines.as_slice() {
        [line] => serde_json::from_str(line).expect("summary is JSON"),
        [] => Value::Null,
        _ => panic!("expected one summary line, got {stdout:?}"),
    };
    (out.status.code().unwrap(), summary)
}

#[test]
fn residual_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(
        dir.path(),
        &["residual", "--system", "lorenz", "--rtol", "1e-8", "--atol", "1e-8", "--t-end", "50", "--samples-per-step", "8", "--out", "res.csv"],
    );
    assert_eq!(code, 0);
    let max = s["max_residual"].as_f64().unwrap();
    let text = std::fs::read_to_string(dir.path().join("res.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,r1,r2,r3,norm"));
    let norms: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(norms.iter().copied().fold(0.0, f64::max), max);
}

#[test]
fn euler_residual_in_modified_field_is_smaller() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["residual", "--method", "euler", "--h", "1e-3", "--t-end", "1"];
    let (_, plain) = run(dir.path(), &base);
    let mut args = base.to_vec();
    args.extend(["--modified-coefficient", "-0.5"]);
    let (code, modified) = run(dir.path(), &args);
    assert_eq!(code, 0);
    assert!(modified["max_residual"].as_f64().unwrap() < 0.1 * plain["max_residual"].as_f64().unwrap());
}

#[test]
fn leapfrog_reports_drifts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(dir.path(), &["leapfrog", "--h", "1.265625", "--steps", "16000", "--orders", "0,2,4", "--out", "drift.csv", "--svg", "q.svg"]);
    assert_eq!(code, 0);
    assert_eq!(s["initial_energy"].as_f64(), Some(0.029952));
    assert_eq!(s["spurious_chaos"], Value::Bool(false));
    let text = std::fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t,p1,p2,q1,q2,h_order0,h_order2,h_order4"));
    assert_eq!(text.lines().count(), 16002);
    assert!(std::fs::read_to_string(dir.path().join("q.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn orbit_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(
        dir.path(),
        &["orbit-graph", "--format", "e3m4", "--map", "gauss", "--edges-out", "edges.csv", "--report-out", "orbits.json", "--dot-out", "g.dot"],
    );
    assert_eq!(code, 0);
    assert_eq!(s["nodes"], 49);
    let edges = std::fs::read_to_string(dir.path().join("edges.csv")).unwrap();
    assert_eq!(edges.lines().count(), 50);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("orbits.json")).unwrap()).unwrap();
    let sizes: u64 = report["component_sizes"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(sizes, 49);
    assert!(std::fs::read_to_string(dir.path().join("g.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn csv_numbers_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(dir.path(), &["simulate", "--t-end", "1", "--out", "traj.csv"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t,y1,y2,y3"));
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let v: f64 = field.parse().unwrap();
        assert_eq!(format!("{v:.16e}").parse::<f64>().unwrap(), v);
        assert!(field.contains('e'));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["no-such-command"]).0, 1);
    assert_eq!(run(dir.path(), &["residual", "--no-such-flag"]).0, 1);
    assert_eq!(run(dir.path(), &["orbit-graph", "--format", "e3x4"]).0, 1);
    assert_eq!(run(dir.path(), &["simulate", "--out", "missing/dir/t.csv", "--t-end", "1"]).0, 1);
    let (code, s) = run(dir.path(), &["separation", "--epsilons", "1e-9", "--horizon", "5"]);
    assert_eq!(code, 2);
    assert_eq!(s["status"], "not-reached");
    let help = Command::new(env!("CARGO_BIN_EXE_bealab")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn config_values_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# shared keys apply where a subcommand accepts them\nrtol = 1e-6\natol = 1e-6\n[leapfrog]\nh = 1.175\nsteps = 50\n",
    )
    .unwrap();
    let (code, s) = run(dir.path(), &["leapfrog", "--h", "0.5", "--steps", "10", "--config", "run.conf"]);
    assert_eq!(code, 0);
    assert_eq!(s["h"].as_f64(), Some(1.175));
    assert_eq!(s["steps"], 50);

    let (_, tight) = run(dir.path(), &["simulate", "--rtol", "1e-10", "--atol", "1e-10", "--t-end", "5"]);
    let (_, conf) = run(dir.path(), &["simulate", "--rtol", "1e-10", "--atol", "1e-10", "--t-end", "5", "--config", "run.conf"]);
    assert!(conf["steps"].as_u64().unwrap() < tight["steps"].as_u64().unwrap());

    // rtol is ignored where it is not a flag
    assert_eq!(run(dir.path(), &["energy", "--config", "run.conf"]).0, 0);
}

#[test]
fn shadow_and_scaling_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(dir.path(), &["shadow", "--format", "e3m4"]);
    assert_eq!(code, 0);
    assert_eq!(s["contraction_holds"], Value::Bool(true));
    assert_eq!(s["shadowed"].as_u64().unwrap() + s["skipped"].as_u64().unwrap(), 49);

    let (code, s) = run(dir.path(), &["scaling", "--formats", "e3m4,e4m3,e5m2,e4m5"]);
    assert_eq!(code, 0);
    assert!(s["slope"].as_f64().unwrap().is_finite());
    assert_eq!(std::fs::read_to_string(dir.path().join("scaling.csv")).unwrap().lines().count(), 5);
}

#[test]
fn stats_and_lyapunov() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(dir.path(), &["stats", "--compare-tol", "1e-10"]);
    assert_eq!(code, 0);
    let rel = s["compare"]["relative_mean_difference"][2].as_f64().unwrap();
    assert!(rel < 0.05);
    let (code, s) = run(dir.path(), &["lyapunov", "--t-total", "300"]);
    assert_eq!(code, 0);
    assert!(s["lambda"].as_f64().unwrap() > 0.5);
}

#[test]
fn reproduce_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (code, s) = run(dir.path(), &["reproduce", "--out-dir", "a"]);
    assert_eq!(code, 0);
    run(dir.path(), &["reproduce", "--out-dir", "b"]);
    let a = std::fs::read(dir.path().join("a/report.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/report.json")).unwrap();
    assert_eq!(a, b);
    let report: Value = serde_json::from_slice(&a).unwrap();
    let ids: Vec<&str> = report["entries"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    for k in 1..=13 {
        assert!(ids.contains(&format!("AC{k}").as_str()), "AC{k} missing");
    }
    let h0 = report["entries"].as_array().unwrap().iter().find(|e| e["id"] == "H0-start").unwrap();
    assert_eq!(h0["measured"].as_f64(), Some(0.029952));
    assert_eq!(h0["status"], "informational");
    assert!(s["passed"].as_u64().unwrap() >= 1);
}

#[test]
fn in_process_entry_point() {
    assert_eq!(bealab::cli::run(["bealab", "energy", "--h", "0"]), 0);
    assert_eq!(bealab::cli::run(["bealab", "energy", "--state", "1,2"]), 1);
}
