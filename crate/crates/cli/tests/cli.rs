use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radon-kit"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("radon-kit-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(path: &PathBuf) -> HashMap<String, String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

#[test]
fn phantom_pgm() {
    let dir = scratch("phantom");
    let out = dir.join("p.pgm");
    let o = run(&["phantom", "--name", "crescent", "--size", "64", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("P2"));
    assert!(lines.next().unwrap().starts_with("# min="));
    assert_eq!(lines.next(), Some("64 64"));
    assert_eq!(lines.next(), Some("65535"));
    assert_eq!(lines.map(|l| l.split_whitespace().count()).sum::<usize>(), 64 * 64);
    let r = report(&dir.join("p.pgm.report"));
    assert_eq!(r["phantom"], "crescent");
    assert_eq!(r["size"], "64");
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&[]).status.code(), Some(1));
    let dir = scratch("usage");
    let out = dir.join("x.pgm");
    let out = out.to_str().unwrap();
    assert_eq!(run(&["phantom", "--name", "nope", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct", "kernel", "--kernel", "mq", "--window", "trunc", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct", "art", "--lambda", "2.5", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["reconstruct", "fbp", "--noise", "gaussian:0", "--out", out]).status.code(), Some(1));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn kernel_reconstruction_report() {
    let dir = scratch("kernel");
    let out = dir.join("k.csv");
    let o = run(&[
        "reconstruct", "kernel", "--kernel", "gaussian", "--window", "gaussian", "--eps", "30", "--nu", "0.5",
        "--angles", "12", "--offsets", "10", "--spacing", "0.1", "--size", "24", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&dir.join("k.csv.report"));
    let rcond: f64 = r["rcond"].parse().unwrap();
    assert!(rcond > 0.0);
    assert!(r["rmse"].parse::<f64>().unwrap().is_finite());
    for key in ["argv", "phantom", "algorithm", "kernel", "window", "nu", "eps", "angles", "offsets", "spacing", "seed"] {
        assert!(r.contains_key(key), "missing {key}");
    }
    let img = fs::read_to_string(&out).unwrap();
    assert_eq!(img.lines().count(), 24);
}

#[test]
fn seeded_runs_are_reproducible() {
    let dir = scratch("seed");
    let mut images = Vec::new();
    for i in 0..2 {
        let out = dir.join(format!("f{i}.csv"));
        let o = run(&["reconstruct", "fbp", "--noise", "poisson:200", "--seed", "9", "--size", "32", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        images.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(images[0], images[1]);
    // the recorded argv reproduces the run
    let r = report(&dir.join("f0.csv.report"));
    assert!(r["argv"].contains("--seed 9"));
    assert_eq!(r["noise"], "poisson:200 seed=9");
}

#[test]
fn sinogram_file_round_trip() {
    let dir = scratch("sino");
    let s = dir.join("s.csv");
    assert!(run(&["sinogram", "--phantom", "bulls-eye", "--angles", "8", "--offsets", "6", "--spacing", "0.15", "--out", s.to_str().unwrap()]).status.success());
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let o = run(&["reconstruct", "art", "--method", "kaczmarz", "--sweeps", "20", "--sinogram", s.to_str().unwrap(), "--size", "12", "--out", a.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&dir.join("a.csv.report"));
    assert_eq!(r["phantom"], "bulls-eye");
    assert_eq!(r["method_detail"], "kaczmarz");
    fs::copy(&a, &b).unwrap();
    let o = run(&["eval", "rmse", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim().parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sweep_marks_failed_points() {
    let dir = scratch("sweep");
    let out = dir.join("sweep.csv");
    let o = run(&[
        "sweep", "kernel", "--param", "h", "--start", "-0.5", "--stop", "1.0", "--step", "0.5",
        "--angles", "6", "--offsets", "5", "--spacing", "0.2", "--size", "8", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "h,rmse,rcond,seconds,status");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].contains("failed"));
    assert!(lines[4].ends_with(",ok"));
    let r = report(&dir.join("sweep.csv.report"));
    assert_eq!(r["points"], "4");
    assert_eq!(r["failed"], "2");
}

#[test]
fn bad_sweep_range_is_usage_error() {
    let o = run(&["sweep", "kernel", "--param", "nu", "--start", "1", "--stop", "0.5", "--step", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
}
