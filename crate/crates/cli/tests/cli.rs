use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn hardy() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hardy"));
    cmd.env_remove("UNWIND_GRID_N");
    cmd
}

fn run(args: &[&str]) -> Output {
    hardy().args(args).output().expect("binary runs")
}

fn write_signal(dir: &Path, name: &str, n: usize, f: impl Fn(f64) -> (f64, f64)) -> PathBuf {
    let mut text = String::from("index,re,im\n");
    for k in 0..n {
        let (re, im) = f(2.0 * PI * k as f64 / n as f64);
        text.push_str(&format!("{k},{re},{im}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Samples of z + z² at z = e^{it}.
fn z_plus_z2(t: f64) -> (f64, f64) {
    (t.cos() + (2.0 * t).cos(), t.sin() + (2.0 * t).sin())
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn re_im(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn unwind_z_plus_z_squared() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_signal(dir.path(), "f.csv", 512, z_plus_z2);
    let out = json(&run(&["unwind", "--input", input.to_str().unwrap(), "--stages", "4", "--grid-n", "512"]));
    let coeffs = out["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 4);
    let expected = [1.0, 1.0, 0.0, 0.0];
    for (c, e) in coeffs.iter().zip(expected) {
        let (re, im) = re_im(c);
        assert!((re - e).abs() < 1e-8 && im.abs() < 1e-8, "{c}");
    }
    assert_eq!(out["truncated"], Value::Bool(false));
}

#[test]
fn grid_size_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_signal(dir.path(), "f.csv", 256, z_plus_z2);
    let out = hardy()
        .env("UNWIND_GRID_N", "128")
        .args(["factor", "--input", input.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(json(&out)["grid"], 128);
    let bad = hardy()
        .env("UNWIND_GRID_N", "lots")
        .args(["factor", "--input", input.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn real_signal_is_lifted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("real.csv");
    let mut text = String::from("index,re\n");
    for k in 0..256 {
        let t = 2.0 * PI * k as f64 / 256.0;
        text.push_str(&format!("{k},{}\n", 3.0 + t.cos()));
    }
    std::fs::write(&path, text).unwrap();
    let out = json(&run(&["factor", "--input", path.to_str().unwrap(), "--grid-n", "256"]));
    // 3 + cos t lifts to 3 + z, which has no zeros in the disk.
    assert_eq!(out["winding"], 0);
    let (re, _) = re_im(&out["outer_at_origin"]);
    assert!((re - 3.0).abs() < 1e-8);
}

#[test]
fn malformed_signal_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "index,re,im\n0,1,0\n1,oops,0\n").unwrap();
    let out = run(&["unwind", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("'re'") && err.contains("row 1"), "{err}");

    std::fs::write(&path, "idx,re,im\n0,1,0\n").unwrap();
    assert_eq!(run(&["unwind", "--input", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn vanishing_signal_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    // (1 + z)^40 is below 1e-9 of its maximum on roughly a third of the circle.
    let input = write_signal(dir.path(), "flat.csv", 256, |t| {
        let w = num_complex::Complex64::from_polar(1.0, t) + 1.0;
        let v = w.powu(40);
        (v.re, v.im)
    });
    let out = run(&["unwind", "--input", input.to_str().unwrap(), "--grid-n", "256"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fixed_points_at_origin() {
    let out = json(&run(&["fixed-points", "--a-re", "0", "--a-im", "0"]));
    let report = &out["report"];
    assert_eq!(report["Q"].as_f64(), Some(-1.0));
    let mut points: Vec<(f64, f64)> = report["fixed_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| re_im(&p["z"]))
        .collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert_eq!(points.len(), 2);
    assert!(points[0].0.abs() < 1e-12 && (points[1].0 - 1.0).abs() < 1e-12);
    assert!(out.get("resultant").is_none());
}

#[test]
fn fixed_points_reject_outside_parameter() {
    assert_eq!(run(&["fixed-points", "--a-re", "-1.2"]).status.code(), Some(2));
}

#[test]
fn mt_dyadic_preset() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_signal(dir.path(), "z.csv", 256, |t| (t.cos(), t.sin()));
    let out = json(&run(&[
        "mt", "--preset", "dyadic", "--n-max", "1", "--input", input.to_str().unwrap(), "--grid-n", "256",
    ]));
    let zeros = out["basis"]["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 2);
    assert!((re_im(&zeros[0]).0 - 0.5).abs() < 1e-15 && (re_im(&zeros[1]).0 + 0.5).abs() < 1e-15);
    // ⟨z, √(1 - 1/4)/(1 - z/2)⟩ = √0.75 / 2.
    let (re, im) = re_im(&out["coefficients"][0]);
    assert!((re - 0.75f64.sqrt() / 2.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn mt_zeros_file_and_range() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.csv");
    std::fs::write(&zeros, "re,im\n0,0\n0,0\n0.3,0.4\n").unwrap();
    let input = write_signal(dir.path(), "z.csv", 256, |t| (t.cos(), t.sin()));
    let out = json(&run(&[
        "mt", "--zeros-file", zeros.to_str().unwrap(), "--input", input.to_str().unwrap(), "--grid-n", "256",
    ]));
    let (re, _) = re_im(&out["coefficients"][1]);
    assert!((re - 1.0).abs() < 1e-12);
    let too_many = run(&[
        "mt", "--zeros-file", zeros.to_str().unwrap(), "--input", input.to_str().unwrap(), "--stages", "9",
    ]);
    assert_eq!(too_many.status.code(), Some(2));
    let both = run(&["mt", "--input", input.to_str().unwrap()]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn curves_are_two_column_csv() {
    let out = run(&["curves", "--kind", "cardioid", "--samples", "32"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,u"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let s = v[0] * v[0] + v[1] * v[1];
        assert!((27.0 * s * s - 18.0 * s + 8.0 * v[0] - 1.0).abs() < 1e-10);
    }
    let bounds = String::from_utf8(run(&["curves", "--kind", "bounds", "--samples", "3"]).stdout).unwrap();
    let rows: Vec<&str> = bounds.lines().collect();
    assert_eq!(rows[0], "t,g,h");
    assert_eq!(rows[3], "1,1,1");
}

#[test]
fn wavelet_table() {
    let out = run(&["wavelet", "--n", "0", "--j", "-1", "--samples", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,re,im\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn render_is_deterministic_and_counts_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ppm");
    let b = dir.path().join("b.ppm");
    let args = |p: &Path| {
        vec![
            "render".to_string(), "--map".into(), "sandwich-k1".into(), "--iterate".into(), "5".into(),
            "--mode".into(), "neglog".into(), "--width".into(), "1024".into(), "--height".into(), "1024".into(),
            "--count-zeros".into(), "--out".into(), p.to_str().unwrap().into(),
        ]
    };
    let first = run(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(first.status.success());
    assert_eq!(String::from_utf8_lossy(&first.stdout).trim(), "32");
    run(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    let (pa, pb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(pa.starts_with(b"P6\n1024 1024\n255\n"));
    assert_eq!(pa, pb);
}

#[test]
fn render_sine_composition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sine.ppm");
    let status = run(&["render", "--map", "sine", "--iterate", "2", "--width", "64", "--height", "64", "--y-max", "3", "--out", out.to_str().unwrap()]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(std::fs::read(&out).unwrap().len(), "P6\n64 64\n255\n".len() + 3 * 64 * 64);
}

#[test]
fn render_validates_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("small.ppm");
    let r = run(&["render", "--map", "sandwich-k1", "--width", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
    let missing = run(&["render", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn iterate_reports_degree_and_ladder() {
    let out = json(&run(&["iterate", "--map", "sandwich-k1", "--n", "3", "--tail"]));
    assert_eq!(out["degree"], 8);
    let counts: Vec<u64> = out["ladder_counts"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(counts, vec![2, 4, 8]);
    assert_eq!(out["tail"]["increments"].as_array().unwrap().len(), 3);
}

#[test]
fn iterate_from_file_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    std::fs::write(&path, r#"{"domain": "disk", "nu": 1, "zeros": [{"re": 0.2, "im": 0.1}]}"#).unwrap();
    let out = json(&run(&["iterate", "--blaschke-file", path.to_str().unwrap(), "--n", "2"]));
    assert_eq!(out["degree"], 4);
    let capped = run(&["iterate", "--blaschke-file", path.to_str().unwrap(), "--n", "13"]);
    assert_eq!(capped.status.code(), Some(2));
    std::fs::write(&path, r#"{"domain": "disk", "zeros": [{"re": 1.5, "im": 0.0}]}"#).unwrap();
    assert_eq!(run(&["iterate", "--blaschke-file", path.to_str().unwrap(), "--n", "2"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["unwind"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}
