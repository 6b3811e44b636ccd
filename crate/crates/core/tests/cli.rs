use std::process::Command;

use consensus_obs::cli::{
    run, ReportDocument, EXIT_DISAGREEMENT, EXIT_OK, EXIT_SIMULATION, EXIT_UNOBSERVABLE, EXIT_USAGE,
};
use consensus_obs::report::NodeMarking;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("consensus-obs").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn analyze_exit_codes() {
    let (code, out, _) = call(&["analyze", "path", "6", "--nodes", "2"]);
    assert_eq!(code, EXIT_UNOBSERVABLE);
    let doc: ReportDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.schema_version, "1");
    assert_eq!(doc.command.name, "analyze");
    assert_eq!(doc.report.blocking_moduli, vec![3]);
    assert!((doc.report.eigenvalues()[0] - 1.0).abs() < 1e-12);
    assert!(doc.report.oracle_checked);

    assert_eq!(
        call(&["analyze", "cycle", "15", "--nodes", "5,12"]).0,
        EXIT_OK
    );
    assert_eq!(call(&["analyze", "path", "8", "--nodes", "5"]).0, EXIT_OK);
    assert_eq!(
        call(&["analyze", "cycle", "15", "--nodes", "4,13"]).0,
        EXIT_UNOBSERVABLE
    );
}

#[test]
fn eigenvalues_carry_exact_and_float_forms() {
    let (_, out, _) = call(&["analyze", "path", "9", "--nodes", "5", "--no-oracle"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let pairs = json["report"]["unobservable_eigenpairs"]
        .as_array()
        .unwrap();
    assert_eq!(pairs.len(), 4);
    for p in pairs {
        let e = &p["eigenvalue"];
        let (a, b) = (e["a"].as_f64().unwrap(), e["b"].as_f64().unwrap());
        let expected = 2.0 - 2.0 * (a * std::f64::consts::PI / b).cos();
        assert!((e["value"].as_f64().unwrap() - expected).abs() <= 1e-12);
    }
    assert!(json.get("oracle").is_none());
}

#[test]
fn usage_errors() {
    for args in [
        vec!["analyze", "path", "6", "--nodes", "2,2"],
        vec!["analyze", "path", "6", "--nodes", "7"],
        vec!["analyze", "path", "6", "--nodes", "0"],
        vec!["analyze", "cycle", "2", "--nodes", "1"],
        vec!["analyze", "tree", "6", "--nodes", "1"],
        vec!["analyze", "path", "6"],
        vec!["mark", "path", "1"],
        vec!["mark", "path", "6", "--format", "svg"],
        vec!["verify", "--max-n", "5", "--subset-sizes", "0"],
        vec!["simulate", "path", "6", "--demo", "indistinguishable"],
        vec!["frobnicate"],
    ] {
        let (code, out, err) = call(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn mark_formats() {
    let (code, out, _) = call(&["mark", "path", "6"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1: \n2: 3\n3: \n4: \n5: 3\n6: \n");
    let (_, out, _) = call(&["mark", "path", "9"]);
    assert!(out.lines().any(|l| l == "5: 3,9"));
    let (_, out, _) = call(&["mark", "cycle", "15", "--format", "json"]);
    let m: NodeMarking = serde_json::from_str(&out).unwrap();
    for syms in &m.symbols {
        assert!(syms.iter().any(|s| s.modulus == 3) && syms.iter().any(|s| s.modulus == 5));
    }
    let (_, out, _) = call(&["mark", "path", "6", "--format", "dot"]);
    assert!(out.starts_with("graph path6 {"));
    assert!(out.contains("2 [label=\"2\\n[3]\"];"));
    assert!(out.contains("5 -- 6;"));
}

#[test]
fn verify_sweeps() {
    let (code, out, _) = call(&["verify", "--max-n", "20", "--subset-sizes", "1,2"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["disagreements"].as_array().unwrap().len(), 0);

    let (_, out, _) = call(&[
        "verify",
        "--max-n",
        "8",
        "--subset-sizes",
        "1",
        "--topology",
        "path",
        "--internal-only",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["total"], 21);

    let (code, out, _) = call(&[
        "verify",
        "--max-n",
        "36",
        "--subset-sizes",
        "2",
        "--topology",
        "cycle",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["disagreements"].as_array().unwrap().len(), 0);
    assert_ne!(EXIT_DISAGREEMENT, EXIT_OK);
}

#[test]
fn simulate_demos() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let csv_arg = csv.to_str().unwrap();

    let (code, out, _) = call(&[
        "simulate",
        "path",
        "6",
        "--observers",
        "2",
        "--demo",
        "indistinguishable",
        "--out",
        csv_arg,
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["max_output_gap"].as_f64().unwrap() <= 1e-7);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x_1,x_2,x_3,x_4,x_5,x_6,y_1\n"));
    assert_eq!(text.lines().count(), 2002);

    let (code, out, _) = call(&["simulate", "path", "4", "--leaders", "2", "--demo", "steer"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["terminal_error"].as_f64().unwrap() <= 1e-3);

    let (code, _, _) = call(&[
        "simulate",
        "cycle",
        "15",
        "--observers",
        "4,13",
        "--demo",
        "indistinguishable",
    ]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = call(&[
        "simulate",
        "cycle",
        "15",
        "--observers",
        "4,13",
        "--demo",
        "indistinguishable",
        "--mode",
        "discrete",
    ]);
    assert_eq!(code, EXIT_OK);

    let (code, _, err) = call(&[
        "simulate",
        "path",
        "8",
        "--observers",
        "3",
        "--demo",
        "indistinguishable",
    ]);
    assert_eq!(code, EXIT_SIMULATION);
    assert!(err.contains("observable"));
    let (code, _, _) = call(&[
        "simulate",
        "path",
        "6",
        "--observers",
        "2",
        "--demo",
        "indistinguishable",
        "--mode",
        "discrete",
        "--epsilon",
        "0.7",
    ]);
    assert_eq!(code, EXIT_SIMULATION);

    let (code, out, _) = call(&[
        "simulate",
        "path",
        "6",
        "--leaders",
        "2",
        "--demo",
        "steer",
        "--target",
        "0.5,0,-0.5,-0.5,0,0.5",
    ]);
    assert_eq!(code, EXIT_UNOBSERVABLE);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
    // Unreachable configurations still steer to the default reachable target.
    assert_eq!(
        call(&["simulate", "path", "6", "--leaders", "2", "--demo", "steer"]).0,
        EXIT_OK
    );
}

#[test]
fn binary_and_size_cap() {
    let bin = env!("CARGO_BIN_EXE_consensus-obs");
    let out = Command::new(bin)
        .args(["analyze", "path", "6", "--nodes", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_UNOBSERVABLE));
    let doc: ReportDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.report.topology.n, 6);

    let out = Command::new(bin)
        .env("CONSENSUS_OBS_MAX_N", "5")
        .args(["analyze", "path", "6", "--nodes", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));

    let out = Command::new(bin)
        .env("CONSENSUS_OBS_MAX_N", "many")
        .args(["mark", "path", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));

    let out = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}
