use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fraclangevin::csvio::{read_table, Table};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclangevin")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn table(path: &Path) -> Table {
    read_table(fs::read(path).unwrap().as_slice(), "test").unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hurst_out_of_range_is_rejected_at_parse_time() {
    let o = run(&["simulate-fbm", "--hurst", "1.2", "--seed", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("(0, 1)"), "{}", stderr(&o));
}

#[test]
fn simulation_requires_a_seed() {
    let o = run(&["simulate-velocity", "--hurst", "0.7"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("seed"));
}

#[test]
fn brownian_case_is_reproducible_for_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["exact", "kernel"] {
        let files: Vec<Vec<u8>> = (0..2)
            .map(|r| {
                let out = dir.path().join(format!("{method}{r}.csv"));
                let o = run(&["simulate-fbm", "--hurst", "0.5", "--steps", "50", "--seed", "4", "--method", method, "--out", s(&out)]);
                assert!(o.status.success(), "{}", stderr(&o));
                fs::read(out).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1]);
        let t = read_table(files[0].as_slice(), "f").unwrap();
        assert_eq!(t.headers, ["t", "BH"]);
        assert_eq!(t.rows(), 51);
    }
}

#[test]
fn variance_report_matches_unit_variance() {
    let o = run(&[
        "simulate-fbm", "--hurst", "0.7", "--method", "exact", "--steps", "64", "--paths", "5000", "--seed", "8",
        "--report", "variance",
    ]);
    assert!(o.status.success());
    let err = stderr(&o);
    let grab = |key: &str| -> f64 {
        let start = err.find(key).unwrap() + key.len();
        err[start..].split(|c: char| c == ' ' || c == ';' || c == ')').next().unwrap().parse().unwrap()
    };
    let (var, se) = (grab("] = "), grab("standard error "));
    assert!((var - 1.0).abs() <= 3.0 * se, "{err}");
    let t = read_table(o.stdout.as_slice(), "stdout").unwrap();
    assert_eq!(t.headers.len(), 5001);
    assert_eq!(t.headers[1], "BH_0");
}

#[test]
fn noiseless_velocity_is_exponential_decay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = run(&[
        "simulate-velocity", "--hurst", "0.7", "--sigma", "0", "--mass", "2", "--friction", "3", "--v0", "1.5",
        "--steps", "100", "--horizon", "2", "--seed", "1", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = table(&out);
    assert_eq!(t.headers, ["t", "V", "VH"]);
    for (time, v) in t.columns[0].iter().zip(&t.columns[1]) {
        assert!((v - (-1.5 * time).exp() * 1.5).abs() <= 1e-12);
    }
}

#[test]
fn zero_amplitude_gives_constant_fractional_velocity() {
    let o = run(&["simulate-velocity", "--hurst", "0.3", "--ah", "0", "--v0", "-0.4", "--steps", "64", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read_table(o.stdout.as_slice(), "stdout").unwrap();
    assert!(t.column("VH").unwrap().iter().all(|&x| x == -0.4));
}

#[test]
fn standard_hurst_writes_velocity_only() {
    let o = run(&["simulate-velocity", "--hurst", "0.5", "--steps", "8", "--seed", "2"]);
    assert!(o.status.success());
    let t = read_table(o.stdout.as_slice(), "stdout").unwrap();
    assert_eq!(t.headers, ["t", "V"]);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"hurst": 0.3, "seed": 5, "steps": 10, "horizon": 2.0}"#).unwrap();
    let o = run(&["--config", s(&cfg), "simulate-fbm", "--steps", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = read_table(o.stdout.as_slice(), "stdout").unwrap();
    assert_eq!(t.columns[0], vec![0.0, 0.5, 1.0, 1.5, 2.0]);

    fs::write(&cfg, r#"{"hurst": 1.5, "seed": 5}"#).unwrap();
    let o = run(&["simulate-fbm", "--config", s(&cfg)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("(0, 1)"));

    fs::write(&cfg, r#"{"hurts": 0.5}"#).unwrap();
    let o = run(&["simulate-fbm", "--config", s(&cfg), "--hurst", "0.4", "--seed", "1"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("hurts"));
}

#[test]
fn exact_power_law_points_give_the_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rs.csv");
    let mut text = String::from("t,rs\n");
    for t in 2..200 {
        text.push_str(&format!("{t},{:?}\n", 1.7 * (t as f64).powf(0.62)));
    }
    fs::write(&input, text).unwrap();
    let o = run(&["estimate-hurst", "--rs-table", s(&input)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&o);
    let est = &r["estimates"][0];
    assert!((est["hurst"].as_f64().unwrap() - 0.62).abs() < 1e-10);
    assert!((est["lambda"].as_f64().unwrap() - 1.7).abs() < 1e-9);
    assert_eq!(est["points_used"].as_u64().unwrap(), 184);
}

#[test]
fn batch_hurst_estimate_on_fbm_paths() {
    let dir = tempfile::tempdir().unwrap();
    let paths = dir.path().join("fbm.csv");
    let rs = dir.path().join("points.csv");
    let o = run(&["simulate-fbm", "--hurst", "0.7", "--steps", "4096", "--paths", "20", "--seed", "77", "--out", s(&paths)]);
    assert!(o.status.success());
    let o = run(&["estimate-hurst", "--increments", "--rs-points", s(&rs), s(&paths)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["applied_to"], "increments");
    assert_eq!(r["estimates"].as_array().unwrap().len(), 20);
    let mean = r["mean_hurst"].as_f64().unwrap();
    assert!((mean - 0.7).abs() <= 0.1, "{mean}");
    let points = table(&rs);
    assert_eq!(points.headers, ["t", "rs"]);
    assert!(points.rows() > 4000);
}

#[test]
fn constant_column_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    fs::write(&input, "t,x\n0,3\n1,3\n2,3\n3,3\n").unwrap();
    let o = run(&["estimate-hurst", "--t-min", "2", s(&input)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("degenerate series"), "{}", stderr(&o));
}

#[test]
fn malformed_csv_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "t,x\n0,1\n1,2\n2,oops\n").unwrap();
    let o = run(&["estimate-hurst", s(&input)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn amplitude_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for h in ["0.3", "0.7"] {
        let file = dir.path().join(format!("v{h}.csv"));
        let o = run(&["simulate-velocity", "--hurst", h, "--ah", "1", "--friction", "2", "--sigma", "0.5", "--steps", "256", "--seed", "3", "--out", s(&file)]);
        assert!(o.status.success());
        let o = run(&["estimate-ah", "--hurst", h, s(&file), s(&file)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let r = json(&o);
        assert!((r["ah"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
        assert_eq!(r["ratios"].as_array().unwrap().len(), 256);
    }
}

#[test]
fn amplitude_needs_matching_grids() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    fs::write(&a, "t,V,VH\n0,1,1\n0.5,0.8,1.1\n1,0.6,1.2\n").unwrap();
    fs::write(&b, "t,V,VH\n0,1,1\n0.5,0.8,1.1\n1.1,0.6,1.2\n").unwrap();
    let o = run(&["estimate-ah", "--hurst", "0.7", s(&a), s(&b)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("data row 3"), "{}", stderr(&o));
}

#[test]
fn zero_velocity_has_degenerate_denominator() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("z.csv");
    let o = run(&["simulate-velocity", "--hurst", "0.7", "--sigma", "0", "--v0", "0", "--steps", "16", "--seed", "1", "--out", s(&file)]);
    assert!(o.status.success());
    let o = run(&["estimate-ah", "--hurst", "0.7", s(&file), s(&file)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("degenerate denominator at t = 0.0625"), "{}", stderr(&o));
}

#[test]
fn validate_qv_check_passes() {
    let o = run(&["validate", "--check", "qv", "--n", "100000", "--T", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"][0]["name"], "qv");
    assert!(r["checks"][0]["value"].as_f64().unwrap() <= 0.05);
    assert!(stderr(&o).starts_with("PASS qv"));
}

#[test]
fn validate_reports_failure_with_exit_code() {
    // Two samples cannot be within 0.05 of a continuous law in KS distance.
    let o = run(&["validate", "--check", "donsker", "--n", "16", "--paths", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["passed"], false);
    assert!(stderr(&o).contains("FAIL donsker"));
}
