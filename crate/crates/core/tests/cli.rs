mod common;

use std::path::Path;
use std::process::{Command, Output};

use avcsym::random::{cell_key, sample_avc, sample_rng};
use avcsym::{f_value, Avc};

fn avcsym(args: &[&str]) -> Output {
    Command::new(common::bin())
        .args(args)
        .env_remove("AVCSYM_SEED")
        .output()
        .expect("binary runs")
}

fn write_channel(dir: &Path, name: &str, avc: &Avc) -> String {
    let path = dir.join(name);
    std::fs::write(&path, avc.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write_channel(dir.path(), "sym.json", &common::symmetric_channel());
    let out = avcsym(&["check", "--input", &sym, "--epsilon", "1e-6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["symmetrizable"], true);

    let indep = write_channel(dir.path(), "indep.json", &common::s_independent_channel());
    let out = avcsym(&["check", "--input", &indep, "--epsilon", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["symmetrizable"], false);
    assert_eq!(v["epsilon"], 1.5);

    let out = avcsym(&["check", "--input", &indep]);
    assert_eq!(json(&out)["epsilon"], 2f64.powi(-10));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"x\": 2, \"w\": [").unwrap();
    let out = avcsym(&["check", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = avcsym(&["check", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fvalue_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sym = write_channel(dir.path(), "sym.json", &common::symmetric_channel());
    let out = avcsym(&["fvalue", "--input", &sym]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["f_value"].as_f64().unwrap() <= 1e-8);

    let indep = write_channel(dir.path(), "indep.json", &common::s_independent_channel());
    let v = json(&avcsym(&["fvalue", "--input", &indep]));
    assert!((v["f_value"].as_f64().unwrap() - 1.6).abs() < 1e-6);
    assert!(v["lp"]["iterations"].as_u64().is_some());

    let avc = sample_avc(4, 6, 4, &mut sample_rng(17, cell_key(4, 4, 6), 0));
    let path = write_channel(dir.path(), "random.json", &avc);
    let v = json(&avcsym(&["fvalue", "--input", &path]));
    let lib = f_value(&avc).unwrap().f_value;
    assert_eq!(v["f_value"].as_f64().unwrap().to_bits(), lib.to_bits());
}

#[test]
fn random_scan_is_reproducible_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = [
        "random-scan",
        "--s",
        "2:6:1",
        "--eps-exp",
        "-10",
        "--samples",
        "100",
        "--seed",
        "3",
    ];
    for p in [&a, &b] {
        let mut full = args.to_vec();
        full.extend(["--out", p.to_str().unwrap()]);
        assert_eq!(avcsym(&full).status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("s,epsilon,fraction,mean_f,samples,seed\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(r[2], "0.0", "s={} has symmetrizable samples", r[0]);
    }
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["args"]["samples"], 100);
    assert_eq!(meta["args"]["seed"], 3);
    assert_eq!(meta["distribution"], "flat-dirichlet");
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(common::bin());
        cmd.args([
            "random-scan",
            "--s",
            "3",
            "--eps-exp",
            "-3",
            "--samples",
            "20",
            "--x",
            "2",
            "--y",
            "2",
        ]);
        cmd.args(extra);
        cmd.env_remove("AVCSYM_SEED");
        if let Some(v) = env {
            cmd.env("AVCSYM_SEED", v);
        }
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    let from_env = run(Some("9"), &[]);
    assert!(from_env.trim_end().ends_with(",9"));
    assert_eq!(from_env, run(None, &["--seed", "9"]));
    assert!(run(None, &[]).trim_end().ends_with(",0"));
}

#[test]
fn bosonic_scan_end_points() {
    let out = avcsym(&["bosonic-scan", "--eta", "1:1:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("eta,f_value,lp_iterations\n"));
    let f: f64 = csv_rows(&text)[0][1].parse().unwrap();
    assert!(f >= 1.5, "{f}");

    let out = avcsym(&["bosonic-scan", "--eta", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bosonic_scan_vanishes_at_both_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = avcsym(&[
        "bosonic-scan",
        "--eta",
        "0:1:0.1",
        "--avc-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let eta: f64 = r[0].parse().unwrap();
        let f: f64 = r[1].parse().unwrap();
        if eta.abs() < 1e-12 || (eta - 0.5).abs() < 1e-12 {
            assert!(f <= 1e-6, "eta {eta}: {f}");
        } else {
            assert!(f > 1e-6, "eta {eta}: {f}");
        }
    }
    let exported = std::fs::read_to_string(dir.path().join("avc_eta_0.5.json")).unwrap();
    assert_eq!(Avc::from_json(&exported).unwrap().x_size(), 6);
}

#[test]
fn discretize_scan_with_opaque_splitter() {
    let out = avcsym(&["discretize-scan", "--eta", "0", "--delta", "2:1:halving"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("delta,s_delta,lp_n,lp_m,f_value,build_seconds,solve_seconds\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    let mut last_n = 0;
    for r in &rows {
        let s: usize = r[1].parse().unwrap();
        let n: usize = r[2].parse().unwrap();
        assert_eq!(n, 6 * s + 15 * 6 + 1);
        assert!(n > last_n);
        last_n = n;
        assert!(r[4].parse::<f64>().unwrap() <= 1e-6);
    }
}

#[test]
fn unwritable_output_fails_before_work() {
    let out = avcsym(&["random-scan", "--samples", "100000", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}
