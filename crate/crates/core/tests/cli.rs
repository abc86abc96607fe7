use std::process::Command;

use serde_json::Value;

fn ia3(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ia3"))
        .args(args)
        .env_remove("IA3_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn bounds_report_for_seven_by_five() {
    let (code, out, _) = ia3(&["bounds", "--m", "7", "--n", "5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let b = &v["bounds"];
    assert_eq!(b["general_ub"], "10");
    assert_eq!(b["beamforming_ub"], "9");
    assert_eq!(b["baseline"], "35/4");
    assert_eq!(b["achievable"], "9");
    assert_eq!(v["meta"]["tool"], "ia3");
    assert_eq!(v["meta"]["seed"], 1);
}

#[test]
fn fig2_sweep_matches_golden() {
    let (code, out, _) = ia3(&["sweep-fig2", "--n", "5", "--m", "1:16"]);
    assert_eq!(code, 0);
    let (meta, body) = out.split_once('\n').unwrap();
    assert!(meta.starts_with("# tool=ia3"));
    assert!(meta.contains("seed=1"));
    assert_eq!(body, include_str!("golden/fig2_n5.csv"));
    assert!(!out.contains('\r'));
}

#[test]
fn synth_is_byte_deterministic_and_certifies() {
    let args = ["synth", "--m", "30", "--n", "19", "--seed", "1"];
    let (code, a, _) = ia3(&args);
    let (_, b, _) = ia3(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["certificate"]["pass"], true);
    assert_eq!(v["certificate"]["total_streams"], 36);
    assert_eq!(v["meta"]["t"], 1);
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ia3"))
        .args(["gen", "--m", "3", "--n", "2"])
        .env("IA3_SEED", "42")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["seed"], 42);
    assert_eq!(v["channel"]["seed"], 42);
}

#[test]
fn certify_round_trips_a_synth_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle.json");
    let b = bundle.to_str().unwrap();
    let (code, _, _) = ia3(&["synth", "--m", "8", "--n", "5", "--seed", "3", "--out", b]);
    assert_eq!(code, 0);
    let (code, out, _) = ia3(&["certify", "--channel", b, "--precoders", b]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["certificate"]["per_slot_dof"], "48/5");
    assert_eq!(v["meta"]["t"], 5);
}

#[test]
fn exit_codes() {
    assert_eq!(ia3(&["synth", "--m", "5"]).0, 2);
    assert_eq!(ia3(&["synth", "--bogus"]).0, 2);
    assert_eq!(
        ia3(&["bounds", "--m", "7", "--n", "5", "--tol-leak", "2"]).0,
        2
    );
    assert_eq!(ia3(&["synth", "--m", "4", "--n", "4"]).0, 3);
    assert_eq!(
        ia3(&["synth", "--m", "5", "--n", "3", "--l", "1", "--dtilde", "2"]).0,
        3
    );
}

#[test]
fn failed_certificate_is_still_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bundle.json");
    let (code, _, err) = ia3(&[
        "synth",
        "--m",
        "5",
        "--n",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 4);
    assert!(err.contains("certification failed"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["certificate"]["pass"], false);
}

#[test]
fn slope_csv_reports_fit() {
    let (code, out, _) = ia3(&[
        "slope",
        "--m",
        "9",
        "--n",
        "3",
        "--snr",
        "40:60",
        "--snr-step",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().contains("certified_dof=9"));
    assert_eq!(lines.next().unwrap(), "snr_db,sum_rate");
    assert_eq!(lines.count(), 5);
}

#[test]
fn fig1_sweep_has_one_column_pair_per_depth() {
    let (code, out, _) = ia3(&["sweep-fig1", "--l", "1:3", "--steps", "4"]);
    assert_eq!(code, 0);
    let header = out.lines().nth(1).unwrap();
    assert!(header.starts_with("ratio,ratio_dec,L1,L1_dec,L2,L2_dec,L3,L3_dec"));
}
