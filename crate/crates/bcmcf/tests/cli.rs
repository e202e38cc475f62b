//! Black-box tests of the command-line binary: exit codes, JSON shape,
//! and the gen/solve/verify round trip.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcmcf"))
}

const MICRO1: &str = "p bcmcf 2 2 6\na 1 2 10 -2 1\na 2 1 10 0 1\n";

#[test]
fn solve_prints_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("micro1.txt");
    std::fs::write(&input, MICRO1).unwrap();
    let out = bin()
        .arg("solve")
        .arg(&input)
        .arg("--check")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["objective"], "-6");
    assert_eq!(json["status"], "optimal");
    assert_eq!(
        json["flow"],
        serde_json::json!([
            { "edge": 0, "value": "3" },
            { "edge": 1, "value": "3" }
        ])
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("certificate verified"));
}

#[test]
fn gen_solve_certify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.txt");
    let report_path = dir.path().join("report.json");
    let status = bin()
        .args([
            "gen",
            "--nodes",
            "20",
            "--density",
            "4",
            "--seed",
            "11",
            "--out",
        ])
        .arg(&inst_path)
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .arg("solve")
        .arg(&inst_path)
        .arg("--out")
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .arg("verify")
        .arg("--certify")
        .arg(&report_path)
        .arg("--instance")
        .arg(&inst_path)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn verify_fuzz_smoke() {
    let out = bin()
        .args(["verify", "--fuzz", "5", "--seed", "3"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("5 cases"));
}

#[test]
fn bench_emits_csv() {
    let out = bin()
        .args(["bench", "--nodes", "16", "--density", "3", "--reps", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,d,m,seed,wall_ms"));
    assert_eq!(lines.count(), 3); // two reps plus the mean row
}

#[test]
fn malformed_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "p bcmcf 2 1 6\na 1 3 10 -2 1\n").unwrap();
    let out = bin().arg("solve").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tampered_certificate_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.txt");
    let report_path = dir.path().join("report.json");
    std::fs::write(&inst_path, MICRO1).unwrap();
    let out = bin()
        .arg("solve")
        .arg(&inst_path)
        .arg("--out")
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(out.success());
    let text = std::fs::read_to_string(&report_path).unwrap();
    std::fs::write(&report_path, text.replace("\"-6\"", "\"-7\"")).unwrap();
    let out = bin()
        .arg("verify")
        .arg("--certify")
        .arg(&report_path)
        .arg("--instance")
        .arg(&inst_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
