use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kklab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SHOCK: &str = "scenario = \"riemann\"\nleft = \"2,2\"\nright = \"1,1\"\nepsilon = 0.1\nn_cells = 200\nt_end = 0.25\n";

#[test]
fn riemann_reports_the_shock_speed() {
    let out = kklab(&[
        "riemann",
        "--left",
        "2,2",
        "--right",
        "1,1",
        "--flux-law",
        "thin_film",
        "--t",
        "1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["wave2"]["type"], "shock");
    assert_eq!(v["wave2"]["speed"], 3.5);
    assert_eq!(v["schema"], "kklab.riemann-waves/1");
}

#[test]
fn riemann_profile_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = kklab(&[
        "riemann",
        "--left",
        "1,1",
        "--right",
        "2,2",
        "--samples",
        "11",
        "--out",
        d,
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,u,v,r,xi");
    assert_eq!(lines.len(), 12);
    let waves: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("waves.json")).unwrap())
            .unwrap();
    assert_eq!(waves["wave2"]["type"], "rarefaction");
}

#[test]
fn check_reports_positive_hessian() {
    let v = stdout_json(&kklab(&[
        "check", "--k", "1", "--p", "0.5", "--m", "0.5", "--M", "4",
    ]));
    assert!(v["min_hessian_eigenvalue"].as_f64().unwrap() > 0.0);
    assert!(v["max_compatibility_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = kklab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "simulate",
        "riemann",
        "converge",
        "check",
        "demo-identity-diffusion",
        "validate-flux",
    ] {
        let out = kklab(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn simulate_writes_a_deterministic_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shock.toml", SHOCK);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let v = stdout_json(&kklab(&[
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]));
        assert_eq!(v["region_pass"], true);
        assert_eq!(v["final_time"], 0.25);
    }
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema"], "kklab.run/1");
    assert_eq!(meta["config"]["epsilon"], 0.1);
    let snaps = meta["snapshots"].as_array().unwrap();
    assert!(snaps.len() >= 2);
    for s in snaps {
        let f = s["file"].as_str().unwrap();
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap()
        );
    }
    let ledger = std::fs::read_to_string(a.join("ledger.csv")).unwrap();
    assert!(ledger.starts_with("t,total_entropy,dissipation_accum,residual"));
}

#[test]
fn epsilon_zero_selects_the_inviscid_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shock.toml", SHOCK);
    let v = stdout_json(&kklab(&["simulate", "--config", &cfg, "--epsilon", "0"]));
    assert_eq!(v["solver"], "hyperbolic");
}

#[test]
fn invalid_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shock.toml", SHOCK);
    let out = kklab(&["simulate", "--config", &cfg, "--override", "epsilon=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));

    let bad = write_config(dir.path(), "bad.toml", "left = \"0.1,2\"\n");
    let out = kklab(&["simulate", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[m, M]^2"));
}

#[test]
fn missing_config_is_an_io_failure() {
    let out = kklab(&["simulate", "--config", "/nonexistent/kklab.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn converge_writes_table_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "shock.toml", SHOCK);
    let out_dir = dir.path().join("conv");
    let v = stdout_json(&kklab(&[
        "converge",
        "--config",
        &cfg,
        "--eps",
        "0.4,0.2,0.1",
        "--window",
        "-5,5",
        "--jobs",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    assert!(v["order_estimate"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert!(csv.starts_with("eps,dx,L1_error,wall_time"));
    assert_eq!(csv.lines().count(), 4);
    let table: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("convergence.json")).unwrap())
            .unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn identity_diffusion_demo_overshoots() {
    let v = stdout_json(&kklab(&["demo-identity-diffusion"]));
    assert!(v["overshoot"].as_f64().unwrap() > 1e-3);
    assert!(v["tailored_overshoot"].as_f64().unwrap() < 1e-8);
}

#[test]
fn validate_flux_accepts_builtin_laws_and_rejects_unknown() {
    for law in ["thin_film", "log"] {
        let v = stdout_json(&kklab(&["validate-flux", "--flux-law", law]));
        assert_eq!(v["pass"], true);
    }
    let out = kklab(&["validate-flux", "--flux-law", "cubic"]);
    assert_eq!(out.status.code(), Some(1));
}
