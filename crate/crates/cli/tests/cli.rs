use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stieltjes-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rows of an `a,re,im` CSV file.
fn read_csv(path: &Path) -> (String, Vec<(f64, f64, f64)>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    (header, rows)
}

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

#[test]
fn verify_kernel_writes_a_passing_report() {
    let dir = Scratch::new();
    let out = dir.file("kernel.json");
    let o = run(&["verify", "--suite", "kernel", "--out", path_arg(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let keys: Vec<usize> = ["\"suite\"", "\"timestamp\"", "\"config\"", "\"passed\"", "\"cases\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "schema key order");
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["suite"], "kernel");
    let cases = doc["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 100);
    for c in cases {
        assert_eq!(c["metric"], "max_error");
        assert!(c["value"].as_f64().unwrap() <= 1e-11);
        assert_eq!(c["pass"], true);
    }
    // nothing but the report is left in the output directory
    assert_eq!(std::fs::read_dir(dir.0.path()).unwrap().count(), 1);
}

#[test]
fn degenerate_grid_exits_2_with_json_error() {
    let o = run(&["transform", "--op", "hilbert", "--fn", "cauchy", "--grid", "1,1,2"]);
    assert_eq!(code(&o), 2);
    let o = run(&["--format", "json", "transform", "--op", "hilbert", "--fn", "cauchy", "--grid", "1,1,2"]);
    assert_eq!(code(&o), 2);
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("grid"));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_invocations_exit_2() {
    assert_eq!(code(&run(&["verify", "--suite", "kernel", "--bogus"])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&run(&["transform", "--op", "hilbert", "--fn", "nope"])), 2);
    assert_eq!(code(&run(&["transform", "--op", "laplace", "--route", "mellin", "--fn", "exp"])), 2);
    assert_eq!(code(&run(&["solve", "--pair", "hilbert", "--alpha", "0.7", "--direction", "forward", "--input", "cauchy"])), 2);
    let o = bin().args(["verify", "--suite", "kernel"]).env("STIELTJES_LAB_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn s2_pair_at_one_half_returns_its_input() {
    let dir = Scratch::new();
    let out = dir.file("h.csv");
    let o = run(&[
        "solve", "--pair", "s2", "--alpha", "0.5", "--direction", "inverse", "--input", "cauchy", "--out", path_arg(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, "x,re,im");
    assert_eq!(rows.len(), 64);
    for (x, re, im) in rows {
        assert!((re - 1.0 / (1.0 + x)).abs() <= 1e-10 * re.abs());
        assert_eq!(im, 0.0);
    }
}

#[test]
fn solve_round_trip_through_files() {
    let dir = Scratch::new();
    let h = dir.file("h.csv");
    let back = dir.file("back.csv");
    let o = run(&[
        "solve", "--pair", "hilbert", "--alpha", "0.25", "--direction", "forward", "--input", "cauchy",
        "--grid", "1e-12,1e12,1201", "--out", path_arg(&h),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&h);
    let at_one = rows.iter().find(|r| (r.0 - 1.0).abs() < 1e-12).unwrap();
    assert!((at_one.1 - 2f64.sqrt() / 4.0).abs() < 1e-8);
    let o = run(&[
        "solve", "--pair", "hilbert", "--alpha", "0.25", "--direction", "inverse", "--input", path_arg(&h),
        "--grid", "0.5,2,8", "--out", path_arg(&back),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for (x, re, _) in read_csv(&back).1 {
        assert!((re - 1.0 / (1.0 + x)).abs() < 1e-3, "x={x} got {re}");
    }
}

#[test]
fn nested_hilbert_route_matches_log_kernel_route() {
    let dir = Scratch::new();
    let a = dir.file("a.csv");
    let b = dir.file("b.csv");
    for (route, out) in [("log-kernel", &a), ("nested-hilbert", &b)] {
        let o = run(&[
            "solve", "--pair", "s2", "--alpha", "0.25", "--direction", "inverse", "--input", "cauchy", "--s2-route", route,
            "--grid", "0.5,2,5", "--out", path_arg(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for (p, q) in read_csv(&a).1.iter().zip(read_csv(&b).1) {
        assert!((p.1 - q.1).abs() < 1e-5 * p.1.abs().max(1.0), "{p:?} {q:?}");
    }
}

#[test]
fn transform_routes_agree() {
    let dir = Scratch::new();
    let direct = dir.file("direct.csv");
    let mellin = dir.file("mellin.csv");
    for (route, out) in [("direct", &direct), ("mellin", &mellin)] {
        let o = run(&["transform", "--op", "s2", "--route", route, "--fn", "exp", "--out", path_arg(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for (p, q) in read_csv(&direct).1.iter().zip(read_csv(&mellin).1) {
        assert_eq!(p.0, q.0);
        assert!((p.1 - q.1).abs() < 1e-7 * p.1.abs(), "{p:?} {q:?}");
    }
}

#[test]
fn spectrum_of_sampled_file() {
    let dir = Scratch::new();
    let samples = dir.file("f.csv");
    let spec = dir.file("spec.csv");
    let mut text = String::from("x,re,im\n");
    for i in 0..=4000 {
        let x = (-40.0 + 0.02 * i as f64).exp();
        text.push_str(&format!("{x:e},{:e},0e0\n", 1.0 / (1.0 + x)));
    }
    std::fs::write(&samples, text).unwrap();
    let o = run(&["spectrum", "--input", path_arg(&samples), "--tau-max", "2", "--tau-step", "0.5", "--out", path_arg(&spec)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&spec);
    assert_eq!(header, "tau,re,im");
    assert_eq!(rows.len(), 9);
    for (tau, re, im) in rows {
        let want = PI / (PI * tau).cosh();
        assert!((re - want).abs() < 1e-6 && im.abs() < 1e-6, "tau={tau}");
    }
}

#[test]
fn convolution_methods_agree() {
    let dir = Scratch::new();
    let mb = dir.file("mb.csv");
    let pw = dir.file("pw.csv");
    for (method, out) in [("mb", &mb), ("pointwise", &pw)] {
        let o = run(&[
            "convolve", "--f", "cauchy", "--g", "cauchy", "--method", method, "--grid", "0.5,2,3", "--out", path_arg(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (read_csv(&mb).1, read_csv(&pw).1);
    for (p, q) in a.iter().zip(&b) {
        assert!((p.1 - q.1).abs() < 1e-3 * q.1.abs());
    }
    assert!((a[1].1 - 5.0 * PI * PI / 16.0).abs() < 1e-3);
}

#[test]
fn invert_with_profile_and_from_spectrum_file() {
    let dir = Scratch::new();
    let out = dir.file("f.csv");
    let profile = dir.file("profile.json");
    let o = run(&["invert", "--fn", "cauchy", "--profile", path_arg(&profile), "--out", path_arg(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let prof: Value = serde_json::from_str(&std::fs::read_to_string(&profile).unwrap()).unwrap();
    assert_eq!(prof["monotone"], true);
    assert_eq!(prof["points"].as_array().unwrap().len(), 61);
    assert!(prof["plateau"].as_f64().unwrap() < 1e-4);
    for (x, re, _) in read_csv(&out).1 {
        assert!((re - 1.0 / (1.0 + x)).abs() < 1e-3);
    }

    // S2 f sampled, its spectrum taken, then inverted
    let g = dir.file("g.csv");
    let gspec = dir.file("gspec.csv");
    let back = dir.file("back.csv");
    let steps = [
        vec!["transform", "--op", "s2", "--fn", "cauchy", "--grid", "1e-30,1e30,1501", "--out", path_arg(&g)],
        vec!["spectrum", "--input", path_arg(&g), "--out", path_arg(&gspec)],
        vec!["invert", "--input", path_arg(&gspec), "--grid", "0.5,2,4", "--out", path_arg(&back)],
    ];
    for args in &steps {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    for (x, re, _) in read_csv(&back).1 {
        assert!((re - 1.0 / (1.0 + x)).abs() < 1e-3, "x={x} got {re}");
    }
    // a file input has no implied reference for the profile
    let o = run(&["invert", "--input", path_arg(&gspec), "--profile", path_arg(&profile)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn failing_suite_exits_1() {
    let o = run(&["verify", "--suite", "inversion", "--fn", "exp"]);
    assert_eq!(code(&o), 1);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], false);
    assert!(doc["cases"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn factorization_reports_one_case_per_pair() {
    let o = run(&["verify", "--suite", "factorization"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cases = doc["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 10);
    let mut ids: Vec<&str> = cases.iter().map(|c| c["id"].as_str().unwrap()).collect();
    ids.dedup();
    assert_eq!(ids.len(), 10);
}

#[test]
fn config_file_and_flags() {
    let dir = Scratch::new();
    let cfg = dir.file("cfg.json");
    std::fs::write(&cfg, r#"{"abs_tol": 1e-12, "rel_tol": 1e-9, "tau_cap": 2.5}"#).unwrap();
    let o = run(&["verify", "--suite", "kernel", "--config", path_arg(&cfg), "--rel-tol", "1e-10"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["config"]["quadrature"]["abs_tol"], 1e-12);
    assert_eq!(doc["config"]["quadrature"]["rel_tol"], 1e-10);
    assert_eq!(doc["config"]["inversion"]["tau_cap"], 2.5);
    std::fs::write(&cfg, r#"{"unknown_knob": 1}"#).unwrap();
    assert_eq!(code(&run(&["verify", "--suite", "kernel", "--config", path_arg(&cfg)])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "kernel", "--config", path_arg(&dir.file("missing.json"))])), 2);
}

#[test]
fn csv_verify_and_catalog_listing() {
    let o = run(&["verify", "--suite", "titchmarsh", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("id,metric,value,tolerance,pass\n"));
    assert_eq!(text.lines().count(), 11);

    let o = run(&["--format", "json", "catalog", "list"]);
    assert_eq!(code(&o), 0);
    let list: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = list.as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["cauchy", "exp", "cauchy2", "gauss_log", "zero"]);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["transform", "--op", "hilbert", "--fn", "cauchy2", "--grid", "0.2,5,9"];
    let one = bin().args(args).env("STIELTJES_LAB_THREADS", "1").output().unwrap();
    let auto = bin().args(args).env("STIELTJES_LAB_THREADS", "0").output().unwrap();
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, auto.stdout);
    assert_eq!(one.stdout, run(&args).stdout);
}
