//! End-to-end tests of the `dephase-lab` binary: artifacts, reproducibility,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dephase-lab"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sample_writes_csv_summary_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let summary = dir.path().join("run.json");
    run_ok(&[
        "sample",
        "--qubits",
        "2",
        "--ensemble",
        "haar",
        "--interaction",
        "z,2z",
        "--samples",
        "200",
        "--seed",
        "11",
        "--workers",
        "2",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let text = read(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "q,s");
    assert_eq!(text.lines().count(), 201, "header plus one row per sample");

    let summary: serde_json::Value = serde_json::from_str(&read(&summary)).unwrap();
    assert_eq!(summary["samples"], 200);
    for key in [
        "count",
        "mean_q",
        "mean_s",
        "var_q",
        "var_s",
        "pearson",
        "regression",
        "binned_curve",
    ] {
        assert!(
            !summary["run"][key].is_null() || key == "binned_curve",
            "summary field {key} missing: {summary}"
        );
    }

    let manifest_path = dir.path().join("run.csv.manifest.json");
    let manifest: serde_json::Value = serde_json::from_str(&read(&manifest_path)).unwrap();
    assert_eq!(manifest["tool"], "dephase-lab");
    assert_eq!(manifest["runs"]["sample"]["seed"], 11);
    assert_eq!(manifest["runs"]["sample"]["samples"], 200);
    assert!(manifest["runs"]["sample"]["wall_seconds"].is_number());
    let streams = manifest["runs"]["sample"]["streams"].as_array().unwrap();
    assert_eq!(streams.len(), 2);
    assert_eq!(
        streams.iter().map(|s| s["samples"].as_u64().unwrap()).sum::<u64>(),
        200
    );
}

#[test]
fn reruns_reproduce_csv_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, seed_env) in [(&a, "9"), (&b, "9")] {
        let out = bin()
            .args([
                "sample",
                "--qubits",
                "3",
                "--ensemble",
                "dicke=1",
                "--samples",
                "300",
                "--workers",
                "2",
                "--out",
                path.to_str().unwrap(),
            ])
            .env("DEPHASE_LAB_SEED", seed_env)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    assert_eq!(read(&a), read(&b), "same seed and workers must replay exactly");

    // A different seed (via the environment fallback) changes the bytes.
    let c = dir.path().join("c.csv");
    let out = bin()
        .args([
            "sample",
            "--qubits",
            "3",
            "--ensemble",
            "dicke=1",
            "--samples",
            "300",
            "--workers",
            "2",
            "--out",
            c.to_str().unwrap(),
        ])
        .env("DEPHASE_LAB_SEED", "10")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(read(&a), read(&c));
}

#[test]
fn separable_sample_has_zero_entanglement() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sep.csv");
    run_ok(&[
        "sample",
        "--qubits",
        "2",
        "--ensemble",
        "separable",
        "--interaction",
        "z,2z",
        "--samples",
        "1",
        "--seed",
        "7",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let text = read(&csv);
    let row = text.lines().nth(1).unwrap();
    let q: f64 = row.split(',').next().unwrap().parse().unwrap();
    assert!(q < 1e-9, "separable states carry no entanglement, got {q}");
}

#[test]
fn experiment_fig2_summary_matches_reference_means() {
    let dir = tempfile::tempdir().unwrap();
    let summary_path = dir.path().join("fig2.json");
    run_ok(&[
        "experiment",
        "fig2",
        "--qubits",
        "3",
        "--samples",
        "100000",
        "--seed",
        "7",
        "--summary",
        summary_path.to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_str(&read(&summary_path)).unwrap();
    let mean_q = summary["haar"]["mean_q"].as_f64().unwrap();
    let mean_s = summary["haar"]["mean_s"].as_f64().unwrap();
    assert!((mean_q - 1.00).abs() < 0.01, "mean_q {mean_q}");
    assert!((mean_s - 2.48).abs() < 0.01, "mean_s {mean_s}");
}

#[test]
fn experiment_fig3_partial_interaction_mean() {
    let dir = tempfile::tempdir().unwrap();
    let summary_path = dir.path().join("fig3.json");
    run_ok(&[
        "experiment",
        "fig3",
        "--qubits",
        "4",
        "--interacting",
        "2",
        "--samples",
        "100000",
        "--seed",
        "7",
        "--summary",
        summary_path.to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_str(&read(&summary_path)).unwrap();
    let mean_s = summary["haar"]["mean_s"].as_f64().unwrap();
    assert!((mean_s - 1.87).abs() < 0.01, "mean_s {mean_s}");
}

#[test]
fn experiment_fig8_single_size_runs_sparse() {
    let dir = tempfile::tempdir().unwrap();
    let summary_path = dir.path().join("fig8.json");
    run_ok(&[
        "experiment",
        "fig8",
        "--qubits",
        "64",
        "--samples",
        "20000",
        "--seed",
        "7",
        "--summary",
        summary_path.to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_str(&read(&summary_path)).unwrap();
    assert_eq!(summary["64q"]["sparse"], true);
    let angle = summary["64q"]["angle_degrees"].as_f64().unwrap();
    assert!((angle - 85.0).abs() < 1.0, "angle {angle}");
}

#[test]
fn list_prints_catalog() {
    let out = run_ok(&["list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "appC", "fig7", "appE", "fig8",
    ] {
        assert!(text.contains(name), "catalog must list {name}");
    }
    assert!(text.contains("table600"));
    assert!(text.contains("dicke-table"));
}

#[test]
fn verify_properties_only_passes() {
    let out = run_ok(&["verify", "--properties-only", "--scale", "0.05"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion 7: PASS"));
    assert!(text.contains("criterion 8: PASS"));
    assert!(text.contains("criterion 9: PASS"));
    assert!(!text.contains("criterion 1:"), "sampling criteria skipped");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage errors: unparseable specs and unknown experiments exit 2.
    let out = bin()
        .args(["sample", "--qubits", "2", "--ensemble", "bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["sample", "--qubits", "2", "--interaction", "q,q"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["experiment", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["bad-subcommand"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Runtime failure: an infeasible rejection sampler exits 1 and reports
    // the acceptance rate.
    let out = bin()
        .args([
            "sample",
            "--qubits",
            "2",
            "--ensemble",
            "energy=0.5:0.0000000001",
            "--samples",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("rate"), "diagnostic missing: {stderr}");
}

#[test]
fn interaction_without_any_coupling_warns() {
    let out = run_ok(&[
        "sample",
        "--qubits",
        "2",
        "--interaction",
        "i,i",
        "--samples",
        "10",
    ]);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("warning"), "expected a warning: {stderr}");
}
