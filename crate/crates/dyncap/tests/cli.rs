use std::fs;
use std::process::{Command, Output};

use dyncap::formats::{parse_boundary_csv, KrausFile};
use dyncap_core::channel::erasure;
use dyncap_core::region::Surface;
use serde_json::Value;

fn dyncap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyncap"))
        .args(args)
        .env_remove("DYNCAP_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn region_csv_has_one_row_per_sample_and_round_trips() {
    let out = dyncap(&[
        "region",
        "--channel",
        "dephasing:p=0.2",
        "--samples",
        "101",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 102);
    let rows = parse_boundary_csv(&text).unwrap();
    assert_eq!(rows.len(), 101);
    let surface = Surface::dephasing(0.2).unwrap();
    for row in &rows {
        let b = surface.bounds(row[0]).unwrap();
        let cef = b.cef_corner();
        let expected = [b.cq_bound, b.qe_bound, b.cqe_bound, cef.c, cef.q, cef.e];
        for (got, want) in row[1..].iter().zip(expected) {
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "{row:?}");
        }
    }
}

#[test]
fn region_writes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("erasure.csv");
    let out = dyncap(&[
        "region",
        "--channel",
        "erasure:eps=0.25",
        "--samples",
        "11",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let rows = parse_boundary_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10][..4], [0.5, 1.5, 0.5, 0.5]);
}

#[test]
fn dcap_erasure_value() {
    let v = stdout_json(&dyncap(&[
        "dcap",
        "--channel",
        "erasure:eps=0.25",
        "--lambda",
        "0",
        "--mu",
        "0",
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-3);
    assert_eq!(v["seed"].as_u64(), Some(dyncap_core::dcap::DEFAULT_SEED));
    assert!(v["ensemble"]["entries"].as_array().is_some_and(|e| !e.is_empty()));
}

#[test]
fn dcap_output_is_deterministic() {
    let args = [
        "dcap",
        "--channel",
        "dephasing:p=0.3",
        "--lambda",
        "0.5",
        "--mu",
        "2",
        "--seed",
        "11",
    ];
    assert_eq!(dyncap(&args).stdout, dyncap(&args).stdout);
}

#[test]
fn member_origin_witness() {
    let v = stdout_json(&dyncap(&[
        "member",
        "--channel",
        "erasure:eps=0.25",
        "--point",
        "0,0,0",
    ]));
    assert_eq!(v["inside"], Value::Bool(true));
    assert_eq!(v["witness"].as_f64(), Some(0.0));
    let v = stdout_json(&dyncap(&[
        "member",
        "--channel",
        "erasure:eps=0.25",
        "--point",
        "1.5,0,0",
    ]));
    assert_eq!(v["inside"], Value::Bool(false));
}

#[test]
fn hyperplane_value() {
    let v = stdout_json(&dyncap(&[
        "hyperplane",
        "--channel",
        "erasure:eps=0.25",
        "--weights",
        "1,2,0",
    ]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-6);
}

#[test]
fn kraus_file_and_ensemble_file() {
    let dir = tempfile::tempdir().unwrap();
    let kraus = dir.path().join("erasure.json");
    fs::write(
        &kraus,
        serde_json::to_string(&KrausFile::from_channel(&erasure(0.25).unwrap())).unwrap(),
    )
    .unwrap();
    let ens = dir.path().join("ens.json");
    fs::write(
        &ens,
        r#"{"entries":[{"p":0.5,"rho":[[[1,0],[0,0]],[[0,0],[0,0]]]},{"p":0.5,"rho":[[[0,0],[0,0]],[[0,0],[1,0]]]}]}"#,
    )
    .unwrap();
    let spec = format!("kraus:@{}", kraus.display());
    let v = stdout_json(&dyncap(&[
        "triple",
        "--channel",
        &spec,
        "--ensemble",
        ens.to_str().unwrap(),
    ]));
    // Two orthogonal pure states through erasure(1/4): I(X;B) = 3/4, no quantum part.
    assert!((v["holevo"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!(v["qe_bound"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["cq_bound"].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn entropy_of_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("bell.json");
    fs::write(
        &state,
        r#"{"dims":[2,2],"rho":[[[0.5,0],[0,0],[0,0],[0.5,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0.5,0],[0,0],[0,0],[0.5,0]]]}"#,
    )
    .unwrap();
    let v = stdout_json(&dyncap(&["entropy", "--state", state.to_str().unwrap()]));
    assert!(v["entropy"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["mutual_information"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((v["coherent_information"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn oracle_report_fields() {
    let v = stdout_json(&dyncap(&[
        "oracle",
        "--channel",
        "erasure:eps=0.25",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--polar",
        "4",
        "--azimuth",
        "4",
        "--simplex",
        "4",
    ]));
    for key in ["best_value", "target", "gap", "grid", "ensemble"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["target"].as_f64().unwrap() - 2.5).abs() < 1e-12);
    assert!(v["gap"].as_f64().unwrap().abs() < 5e-3);
}

#[test]
fn exit_codes() {
    assert_eq!(dyncap(&["region", "--channel", "dephasing:p=2"]).status.code(), Some(1));
    assert_eq!(dyncap(&["region", "--channel", "dephasing"]).status.code(), Some(1));
    assert_eq!(dyncap(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        dyncap(&[
            "triple",
            "--channel",
            "dephasing:p=0.1",
            "--ensemble",
            "/nonexistent/ens.json"
        ])
        .status
        .code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"in_dim":2,"out_dim":2,"kraus":[[[1,0],[0,0],[0,0],[0.5,0]]]}"#,
    )
    .unwrap();
    let out = dyncap(&["dcap", "--channel", &format!("kraus:@{}", bad.display())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn dimension_cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_dyncap"))
            .args(["dcap", "--channel", "identity:d=3", "--evaluations", "500"])
            .env("DYNCAP_MAX_DIM", cap)
            .output()
            .unwrap()
    };
    let out = run("2");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maximum 2"));
    assert!(run("16").status.success());
    assert_eq!(run("zero").status.code(), Some(1));
}
