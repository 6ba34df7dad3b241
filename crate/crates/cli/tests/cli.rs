use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

use corner_spectrum::mellin::io::{read_radial_csv, write_radial_csv};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_corner-spectrum"));
    c.env_remove("CORNER_SPECTRUM_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const SMALL: [&str; 6] = ["--grid-t", "1024", "--grid-eta", "1024", "--grid-theta", "16"];

#[test]
fn spectrum_reports_real_pair() {
    let v = json(&run(&["spectrum", "--mu", "-5", "--band", "-0.1", "1", "5"]));
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert_eq!(roots[0]["re"].as_f64(), Some(0.0));
    assert!((roots[1]["re"].as_f64().unwrap() - 0.4601069123252318).abs() < 1e-10);
    assert_eq!(v["regime"], "IndexConjecturedYes");
    assert!((v["closed_form"]["lambda1"].as_f64().unwrap() - 0.4601069123252318).abs() < 1e-15);
}

#[test]
fn spectrum_reports_imaginary_pair() {
    let v = json(&run(&["spectrum", "--mu", "-2", "--band", "-0.1", "1", "5"]));
    assert_eq!(v["regime"], "IndexConjecturedNo");
    let ims: Vec<f64> = v["roots"].as_array().unwrap().iter().map(|r| r["im"].as_f64().unwrap()).collect();
    assert_eq!(ims.len(), 3);
    assert!((ims[2] - 0.6126979250600663).abs() < 1e-10);
    assert_eq!(ims[0], -ims[2]);
}

#[test]
fn excluded_and_invalid_contrasts_exit_with_two() {
    for mu in ["-1", "0"] {
        let out = run(&["spectrum", "--mu", mu]);
        assert_eq!(code(&out), 2);
    }
    let out = run(&["spectrum", "--mu", "-1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("excluded contrast"));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["spectrum"])), 1);
    assert_eq!(code(&run(&["sweep", "--from", "-1", "--to", "0", "--step", "0"])), 1);
    assert_eq!(code(&run(&["residue", "--mu", "-5", "--lambda", "0.46", "0", "--format", "csv"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn sweep_is_monotone_on_the_upper_branch() {
    let rows = csv_rows(&run(&["sweep", "--from", "-0.33", "--to", "-0.01", "--step", "0.01"]));
    assert_eq!(rows.len(), 33);
    let l: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(l.windows(2).all(|w| w[1] >= w[0]), "{l:?}");
}

#[test]
fn sweep_marks_boundary_and_exclusion() {
    let rows = csv_rows(&run(&["sweep", "--from", "-4", "--to", "0", "--step", "0.1"]));
    let at = |mu: f64| rows.iter().find(|r| r[0].parse::<f64>().unwrap() == mu).unwrap().clone();
    let r3 = at(-3.0);
    assert_eq!(r3[3], "IndexConjecturedNo");
    assert_eq!(r3[2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(at(-1.0)[4], "excluded");
    assert_eq!(at(-3.1)[3], "IndexConjecturedYes");
}

#[test]
fn sweep_svg_is_well_formed() {
    let out = run(&["sweep", "--from", "-5", "--to", "-0.1", "--step", "0.05", "--format", "svg"]);
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert_eq!(s.matches("stroke-width").count(), 2);
}

fn profile(args: &[&str]) -> Vec<(f64, f64, f64)> {
    csv_rows(&run(args))
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect()
}

fn l2(p: &[(f64, f64, f64)]) -> f64 {
    let h = p[1].0 - p[0].0;
    let f: Vec<f64> = p.iter().map(|(_, a, b)| a * a + b * b).collect();
    (h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[f.len() - 1]))).sqrt()
}

#[test]
fn constant_profile_is_normalized() {
    let p = profile(&["singular-function", "--mu", "-2", "--index", "0"]);
    assert_eq!(p.len(), 512);
    let c = 1.0 / (2.0 * PI).sqrt();
    assert!(p.iter().all(|(_, a, b)| (a.abs() - c).abs() < 1e-12 && b.abs() < 1e-12));
}

#[test]
fn first_profile_is_continuous_and_normalized() {
    let p = profile(&["singular-function", "--mu", "-5", "--index", "1"]);
    assert_eq!(p.len(), 512);
    assert!((l2(&p) - 1.0).abs() < 1e-4);
    let (first, last) = (p[0], p[p.len() - 1]);
    assert!((first.1 - last.1).abs() < 1e-12 && (first.2 - last.2).abs() < 1e-12);
    let jump = p.windows(2).map(|w| (w[1].1 - w[0].1).abs()).fold(0.0, f64::max);
    assert!(jump < 0.05, "{jump}");
}

#[test]
fn missing_term_exits_with_three() {
    assert_eq!(code(&run(&["singular-function", "--mu", "-2", "--index", "1"])), 3);
}

#[test]
fn solve1d_paths_agree() {
    let closed = json(&run(&["solve1d"]));
    assert!((closed["value"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    assert!((closed["d_plus"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((closed["d_minus"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    let fd = json(&run(&["solve1d", "--sampled"]));
    for key in ["value", "d_plus", "d_minus"] {
        assert!((fd[key].as_f64().unwrap() - closed[key].as_f64().unwrap()).abs() < 1e-6);
    }
    assert_eq!(code(&run(&["solve1d", "--mu", "-1"])), 2);
}

#[test]
fn invert_line_recovers_manufactured_solution() {
    let mut args = vec!["invert-line", "--mu", "-5", "--omega", "2", "--format", "json"];
    args.extend(SMALL);
    let v = json(&run(&args));
    assert!(v["manufactured_relative_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["grid"]["t"], 1024);
}

#[test]
fn line_through_spectrum_exits_with_three() {
    // gamma = 1 - lambda1 puts the line on the exponent.
    let gamma = (1.0 - 0.4601069123252318).to_string();
    let mut args = vec!["invert-line", "--mu", "-5", "--gamma", gamma.as_str()];
    args.extend(SMALL);
    let out = run(&args);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn radial_csv_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let mut args = vec!["invert-line", "--mu", "-5", "--omega", "2", "--out", path.to_str().unwrap()];
    args.extend(SMALL);
    assert!(run(&args).status.success());
    let bytes = std::fs::read(&path).unwrap();
    let v = read_radial_csv(bytes.as_slice()).unwrap();
    let mut again = Vec::new();
    write_radial_csv(&v, &mut again).unwrap();
    assert_eq!(bytes, again);
}

#[test]
fn residue_recovers_planted_amplitude() {
    let mut args = vec!["residue", "--mu", "-5", "--lambda", "0.4601069123252318", "0", "--amplitude", "-1.5"];
    args.extend(SMALL);
    let v = json(&run(&args));
    let c = v["coefficients"][0]["re"].as_f64().unwrap();
    assert!((c + 1.5).abs() < 1.5e-3, "{c}");
    assert!(v["spread"].as_f64().unwrap() < 1e-6);
}

#[test]
fn residue_contour_errors_exit_with_four() {
    let mut args = vec!["residue", "--mu", "-5", "--lambda", "0.4601069123252318", "0", "--radius", "0.6"];
    args.extend(SMALL);
    assert_eq!(code(&run(&args)), 4);
}

#[test]
fn config_file_overrides_defaults() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# coarse grids\ngrid_t = 512\ngrid_eta = 512\ngrid_theta = 8").unwrap();
    let out = bin()
        .args(["invert-line", "--mu", "-5", "--omega", "2", "--format", "json"])
        .env("CORNER_SPECTRUM_CONFIG", file.path())
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["grid"]["t"], 512);
    assert_eq!(v["grid"]["theta_per_sector"], 8);
    let out = bin()
        .args(["invert-line", "--mu", "-5", "--omega", "2", "--format", "json", "--grid-t", "600"])
        .env("CORNER_SPECTRUM_CONFIG", file.path())
        .output()
        .unwrap();
    assert_eq!(json(&out)["grid"]["t"], 600);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "grid_q = 3").unwrap();
    let out = bin().args(["spectrum", "--mu", "-5"]).env("CORNER_SPECTRUM_CONFIG", bad.path()).output().unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["spectrum", "--mu", "-0.7", "--omega", "2.3"]);
    let b = run(&["spectrum", "--mu", "-0.7", "--omega", "2.3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
