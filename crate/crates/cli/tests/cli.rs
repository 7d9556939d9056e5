use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entropy-perturb"));
    c.env_remove("ENTROPY_PERTURB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    text.trim_end().to_string()
}

fn write(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn qubit_files() -> (PathBuf, PathBuf) {
    (
        write("rho_qubit.json", r#"{"dim":2,"entries":[[0.75,0],[0,0],[0,0],[0.25,0]]}"#),
        write("h_qubit.json", r#"{"dim":2,"entries":[[0,0],[0.1,0],[0.1,0],[0,0]]}"#),
    )
}

fn coeff(v: &Value, k: usize) -> f64 {
    v["coefficients"][k].as_f64().unwrap()
}

#[test]
fn series_from_files() {
    let (r, h) = qubit_files();
    let out = run(&["series", "--rho0", r.to_str().unwrap(), "--H", h.to_str().unwrap(), "--order", "4"]);
    let v = stdout_json(&out);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 5);
    assert_eq!(v["methods"][0], "exact");
    // d²S/dε² = −0.04·log 3
    assert!((coeff(&v, 2) + 0.02 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn onemode_example() {
    let v = stdout_json(&run(&["example", "--name", "onemode-thermal", "--v", "0.5", "--alpha", "1", "--order", "4"]));
    assert!((coeff(&v, 2) + 2f64.ln()).abs() < 1e-9);
    assert!((coeff(&v, 4) + 0.48104906).abs() < 1e-7);
    assert!(coeff(&v, 1).abs() < 1e-10 && coeff(&v, 3).abs() < 1e-10);
}

#[test]
fn displaced_example_vanishes() {
    let v = stdout_json(&run(&["example", "--name", "displaced-thermal", "--v", "0.5", "--alpha", "1", "--order", "3"]));
    for k in 1..=3 {
        assert!(coeff(&v, k).abs() < 1e-8, "s{k} = {}", coeff(&v, k));
    }
}

#[test]
fn twomode_example_and_bits() {
    let v = stdout_json(&run(&["example", "--name", "twomode-thermal", "--order", "2"]));
    assert!((coeff(&v, 2) + 0.46209812).abs() < 1e-8);
    let b = stdout_json(&run(&["example", "--name", "onemode-thermal", "--order", "1", "--base", "bits"]));
    assert!((coeff(&b, 0) - 2.0).abs() < 1e-10);
    assert_eq!(b["base"], "bits");
}

#[test]
fn json_is_byte_stable() {
    let args = ["example", "--name", "displaced-thermal", "--order", "3", "--exact-at", "0.01"];
    let a = run(&args);
    let b = bin().args(args).env("ENTROPY_PERTURB_THREADS", "3").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exact_residual_is_reported() {
    let v = stdout_json(&run(&["example", "--name", "onemode-thermal", "--exact-at", "0.01"]));
    let r = v["exact"]["residual"].as_f64().unwrap();
    assert!(r > 0.0 && r < 1e-11, "{r}");
}

#[test]
fn csv_keeps_seventeen_digits() {
    let out = run(&["example", "--name", "onemode-thermal", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let json = stdout_json(&run(&["example", "--name", "onemode-thermal"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,value,method"));
    for (k, line) in lines.enumerate() {
        let field = line.split(',').nth(1).unwrap();
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{field}");
        assert_eq!(field.parse::<f64>().unwrap(), coeff(&json, k));
    }
}

#[test]
fn multi_term_files() {
    let (r, h) = qubit_files();
    let h2 = write("h2_qubit.json", r#"{"dim":2,"entries":[[0.05,0],[0,0],[0,0],[-0.05,0]]}"#);
    let v = stdout_json(&run(&[
        "series",
        "--rho0",
        r.to_str().unwrap(),
        "--H",
        h.to_str().unwrap(),
        "--H2",
        h2.to_str().unwrap(),
        "--order",
        "2",
        "--exact-at",
        "0.01",
    ]));
    assert_eq!(v["methods"][2], "quadrature");
    assert!(v["exact"]["residual"].as_f64().unwrap() < 1e-9);
    // −Tr[H⁽²⁾ log ρ₀] enters s₂
    let single = stdout_json(&run(&["series", "--rho0", r.to_str().unwrap(), "--H", h.to_str().unwrap(), "--order", "2"]));
    let shift = -(0.05 * 0.75f64.ln() - 0.05 * 0.25f64.ln());
    assert!((coeff(&v, 2) - coeff(&single, 2) - shift).abs() < 1e-9);
}

#[test]
fn convergence_sweep_scales() {
    let out = run(&["convergence", "--name", "onemode-thermal", "--format", "json", "--steps", "4"]);
    let v = stdout_json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let ratio = r["ratio"].as_f64().unwrap();
        assert!((ratio - 64.0).abs() < 4.0, "{ratio}");
    }
    let csv = String::from_utf8(run(&["convergence", "--name", "onemode-thermal"]).stdout).unwrap();
    assert!(csv.starts_with("eps,exact,series,residual,ratio\n"));
}

#[test]
fn convergence_with_zero_perturbation() {
    let (r, _) = qubit_files();
    let z = write("h_zero.json", r#"{"dim":2,"entries":[[0,0],[0,0],[0,0],[0,0]]}"#);
    let v = stdout_json(&run(&["convergence", "--rho0", r.to_str().unwrap(), "--H", z.to_str().unwrap(), "--format", "json"]));
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["residual"].as_f64() == Some(0.0)));
}

#[test]
fn convergence_two_mode() {
    let v = stdout_json(&run(&[
        "convergence", "--name", "twomode-thermal", "--D", "6", "--tail-tol", "0.1", "--order", "2", "--eps", "0.05", "--steps", "3",
        "--format", "json",
    ]));
    for r in &v["rows"].as_array().unwrap()[1..] {
        assert!(r["ratio"].as_f64().unwrap() > 7.0, "{r}");
    }
}

#[test]
fn validate_passes_on_examples() {
    let v = stdout_json(&run(&["validate", "--name", "onemode-thermal"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    let (r, h) = qubit_files();
    let q = stdout_json(&run(&["validate", "--rho0", r.to_str().unwrap(), "--H", h.to_str().unwrap()]));
    assert_eq!(q["pass"], true);
    assert_eq!(q["nondegenerate"], true);
}

#[test]
fn exit_codes_and_messages() {
    let bad = write("bad.json", r#"{"dim":2,"entries":[[1,0]]}"#);
    let out = run(&["series", "--rho0", bad.to_str().unwrap(), "--H", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error[parse]: series: "));

    let nonherm = write("nonherm.json", r#"{"dim":2,"entries":[[0.5,0],[0.1,0],[0,0],[0.5,0]]}"#);
    let (_, h) = qubit_files();
    let out = run(&["series", "--rho0", nonherm.to_str().unwrap(), "--H", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("error[input]: series: not Hermitian"));

    let pure = write("pure.json", r#"{"dim":2,"entries":[[1,0],[0,0],[0,0],[0,0]]}"#);
    let out = run(&["series", "--rho0", pure.to_str().unwrap(), "--H", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("error[domain]: series: null-space coupling"));

    for args in [&["series"][..], &["series", "--order", "0"], &["bogus"], &["example"], &[]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr_line(&out).starts_with("error[usage]: "), "{args:?}");
    }

    let out = run(&["example", "--name", "onemode-thermal", "--D", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).contains("truncation too coarse"));

    let out = bin().args(["example", "--name", "onemode-thermal"]).env("ENTROPY_PERTURB_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_succeeds() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("convergence"));
}
