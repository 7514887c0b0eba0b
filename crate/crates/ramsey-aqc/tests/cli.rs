//! End-to-end checks of the command-line surface: subcommands, formats,
//! exit codes, and output determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey-aqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn oracle_reports_ground_state_json() {
    let out = run(&["oracle", "--m", "2", "--n", "7", "--N", "7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["schema"], "ramsey-aqc/1");
    assert_eq!(v["e_gs"], 1);
    assert_eq!(v["degeneracy"], 22);
}

#[test]
fn oracle_witnesses_are_bit_strings() {
    let out = run(&[
        "oracle",
        "--m",
        "3",
        "--n",
        "3",
        "--N",
        "4",
        "--witnesses",
        "5",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let wits = v["witnesses"].as_array().unwrap();
    assert_eq!(wits.len(), 5);
    for w in wits {
        let s = w.as_str().unwrap();
        assert_eq!(s.len(), 6);
        assert!(s.chars().all(|c| c == '0' || c == '1'));
    }
}

#[test]
fn oracle_csv_format() {
    let out = run(&[
        "oracle", "--m", "2", "--n", "5", "--N", "5", "--format", "csv",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "m,n,N,e_gs,degeneracy\n2,5,5,1,11\n");
}

#[test]
fn exit_codes_follow_error_kind() {
    // Validation: malformed and out-of-domain arguments.
    let out = run(&["oracle", "--m", "1", "--n", "3", "--N", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(v["kind"], "validation");

    let out = run(&["evolve", "--m", "2", "--n", "5", "--N", "3", "--badflag"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr(&out).trim().lines().count(), 1);

    // Resource cap: oversized register.
    let out = run(&["oracle", "--m", "3", "--n", "3", "--N", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(v["kind"], "resource");

    let out = run(&["oracle", "--m", "3", "--n", "3", "--N", "12"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["gap", "--m", "2", "--n", "7", "--N", "7"]);
    assert_eq!(out.status.code(), Some(2));

    // Sample-mode domain violations.
    let out = run(&[
        "ramsey",
        "--m",
        "2",
        "--n",
        "2",
        "--mode",
        "sample",
        "--epsilon",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evolve_emits_run_record() {
    let out = run(&[
        "evolve", "--m", "2", "--n", "5", "--N", "3", "--steps", "500", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,n,N,L,T,steps,integrator,e_gs,degeneracy,p_success,decision"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("2,5,3,3,5,500,rk4,0,1,0.59"));
    assert!(row.ends_with("CONTINUE"));

    let out = run(&[
        "evolve", "--m", "2", "--n", "5", "--N", "3", "--steps", "500",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["N"], 3);
    assert_eq!(v["steps"], 500);
    assert!(v["norm_drift"].as_f64().unwrap() < 1e-6);
    assert!(v["wall_time_s"].as_f64().is_some());
}

#[test]
fn evolve_writes_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let out = run(&[
        "evolve",
        "--m",
        "2",
        "--n",
        "5",
        "--N",
        "3",
        "--steps",
        "50",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,s,overlap_gs,norm");
    assert_eq!(lines.len(), 52); // header + 51 points (steps 0..=50)
}

#[test]
fn ramsey_sweep_and_determinism() {
    let args = [
        "ramsey", "--m", "2", "--n", "5", "--steps", "400", "--mode", "sample", "--seed", "11",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert_eq!(v["ramsey_number"], 5);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.last().unwrap()["decision"], "THRESHOLD");

    // Byte-identical output for identical config and seed.
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn ramsey_rejects_non_strict_start() {
    let out = run(&["ramsey", "--m", "3", "--n", "3", "--start-N", "6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn export_terms_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.txt");
    let out = run(&[
        "export-terms",
        "--m",
        "3",
        "--n",
        "3",
        "--N",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ramsey-terms v1 L=6 m=3 n=3 N=4");
    assert_eq!(lines.len(), 9); // header + 2 C(4,3) terms
    assert_eq!(lines[1], "+1 0:P1 1:P1 3:P1");
    assert!(lines[5].starts_with("+1 0:P0"));
}

#[test]
fn gap_csv_grid() {
    let out = run(&[
        "gap",
        "--m",
        "2",
        "--n",
        "5",
        "--N",
        "3",
        "--samples",
        "5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,e0,e1");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[5].starts_with("1,"));
}

#[test]
fn thread_cap_env_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_ramsey-aqc"))
        .env("RAMSEY_AQC_THREADS", "1")
        .args(["oracle", "--m", "2", "--n", "2", "--N", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["e_gs"], 1);
    assert_eq!(v["degeneracy"], 2);
}
