//! End-to-end runs of the `fucik` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fucik_core::io::read_curve_csv;
use serde_json::Value;

fn fucik(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fucik")).args(args).env("FUCIK_OUT_DIR", out).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["spectrum", "--n", "1", "--backend", "spectral", "--kmax", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let m = manifest(&dir.path().join("spectrum.json"));
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["report"]["spectrum"]["max_error"], 0.0);

    let o = fucik(dir.path(), &["spectrum", "--n", "2", "--kmax", "5"]);
    assert_eq!(code(&o), 0);
    let m = manifest(&dir.path().join("spectrum.json"));
    let mults: Vec<u64> = m["report"]["spectrum"]["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["multiplicity"].as_u64().unwrap())
        .collect();
    assert_eq!(mults, vec![1, 2, 3, 4, 5]);

    let o = fucik(dir.path(), &["spectrum", "--n", "1", "--backend", "fd", "--tol", "2e-3"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn spectrum_failure_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    // fd is not accurate to 1e-12
    assert_eq!(code(&fucik(dir.path(), &["spectrum", "--backend", "fd", "--tol", "1e-12"])), 2);
    assert_eq!(code(&fucik(dir.path(), &["spectrum", "--kmax", "500"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["spectrum", "--n", "2", "--backend", "fd"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["spectrum", "--radius", "-1"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["spectrum", "--no-such-flag"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["--help"])), 0);
}

#[test]
fn curve_on_half_steps_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["curve", "--p", "0:10:0.5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = read_curve_csv(fs::File::open(dir.path().join("curve.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 21);
    for w in rows.windows(2) {
        assert!(w[1].beta <= w[0].beta && w[1].alpha > w[0].alpha);
    }
    let m = manifest(&dir.path().join("curve.json"));
    assert_eq!(m["report"]["passed"], true);
    assert_eq!(m["report"]["properties"]["monotone"]["passed"], true);
}

#[test]
fn curve_symmetry_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["curve", "--p", "-2:2:1", "--check", "symmetry"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let m = manifest(&dir.path().join("curve.json"));
    let pts = m["report"]["symmetry"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    for p in pts {
        assert!(p["defect"].as_f64().unwrap() <= 1e-4);
    }
}

#[test]
fn curve_matrix_oracle_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["curve", "--p", "0", "--oracle", "matrix"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().find(|l| l.starts_with("oracle")).unwrap().to_string();
    assert!(line.contains("minimax=3.000000000000") && line.ends_with("pass"), "{line}");
}

#[test]
fn curve_rejects_bad_grids() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fucik(dir.path(), &["curve", "--p", "1:0:0.5"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["curve", "--p", "0", "--path-nodes", "4"])), 1);
    assert_eq!(code(&fucik(dir.path(), &["curve"])), 1);
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&fucik(d.path(), &["curve", "--p", "0:2:0.5", "--svg"])), 0);
    }
    for f in ["curve.csv", "curve.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn out_dir_flag_beats_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = fucik(env_dir.path(), &["spectrum", "--out-dir", flag_dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(flag_dir.path().join("spectrum.json").exists());
    assert!(!env_dir.path().join("spectrum.json").exists());
}

#[test]
fn nonlinear_default_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["nonlinear", "--f0", "2.0", "--finf", "1.6"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(dir.path().join("u1.csv").exists() && dir.path().join("u2.csv").exists());
    let m = manifest(&dir.path().join("nonlinear.json"));
    let e = &m["report"]["report"]["energies"];
    assert!(e[0].as_f64().unwrap() < 0.0 && e[1].as_f64().unwrap() > 0.0);
}

#[test]
fn nonlinear_rejects_small_limits() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["nonlinear", "--f0", "0.4", "--finf", "1.6"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("f₀ ≤ λ₁"));
}

#[test]
fn nonlinear_seed_does_not_move_solutions() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&fucik(a.path(), &["nonlinear", "--seed", "7"])), 0);
    assert_eq!(code(&fucik(b.path(), &["nonlinear", "--seed", "8"])), 0);
    for f in ["u1.csv", "u2.csv"] {
        let read = |d: &Path| fucik_core::io::read_profile_csv(fs::File::open(d.join(f)).unwrap()).unwrap();
        let (x, y) = (read(a.path()), read(b.path()));
        let worst = x.iter().zip(&y).fold(0.0f64, |m, (p, q)| m.max((p.1 - q.1).abs()));
        assert!(worst < 1e-5, "{f}: {worst:e}");
    }
}

#[test]
fn plot_counts_vertices_and_marks_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (0..21)
        .map(|i| {
            let p = 0.5 * i as f64;
            let c = 0.5 + 0.5 / (1.0 + p);
            format!("{p:.16e},{:.16e},{c:.16e},1e-9,1e-13,10,true\n", p + c)
        })
        .collect();
    let input = dir.path().join("trace.csv");
    fs::write(&input, format!("p,alpha,beta,grad_norm,residual,iterations,refined\n{rows}")).unwrap();
    assert_eq!(code(&fucik(dir.path(), &["plot", "--input", input.to_str().unwrap()])), 0);
    let svg = fs::read_to_string(dir.path().join("trace.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(pts.split(' ').count(), 21);
    assert!(svg.contains(r#"data-alpha="1" data-beta="1""#));
}

#[test]
fn plot_empty_and_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "p,alpha,beta,grad_norm,residual,iterations,refined\n").unwrap();
    assert_eq!(code(&fucik(dir.path(), &["plot", "--input", empty.to_str().unwrap()])), 0);
    let svg = fs::read_to_string(dir.path().join("empty.svg")).unwrap();
    assert!(svg.contains("id=\"axes\"") && !svg.contains("polyline"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "a,b\n1,2\n").unwrap();
    assert_eq!(code(&fucik(dir.path(), &["plot", "--input", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&fucik(dir.path(), &["plot", "--input", "/no/such/file.csv"])), 1);
}

#[test]
fn verify_all_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = fucik(dir.path(), &["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let m = manifest(&dir.path().join("verify.json"));
    assert_eq!(m["report"]["identities"]["samples"], 1000);
    assert_eq!(m["report"]["passed"], true);
}
