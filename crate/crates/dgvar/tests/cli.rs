//! End-to-end tests of the command-line binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dgvar"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dgvar-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn field<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("missing {key}= in output:\n{out}"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const GAUSSIAN_MODEL: &str = r#"{"p":1,"sigma":[1.0],"delta":[1.0],
    "gamma":{"diag":[0.0]},"dt":1.0,"dist":"normal"}"#;

#[test]
fn var_gaussian_matches_quantile() {
    let dir = tmp_dir("var");
    let path = dir.join("model.json");
    fs::write(&path, GAUSSIAN_MODEL).unwrap();
    let out = bin()
        .args(["var", path.to_str().unwrap(), "--gamma", "0.01", "--epsilon", "1e-6"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let v: f64 = field(&text, "var").parse().unwrap();
    assert!((v + 2.3263478740408408).abs() < 1e-6, "var = {v}");
}

#[test]
fn missing_field_exits_2() {
    let dir = tmp_dir("badmodel");
    let path = dir.join("model.json");
    fs::write(&path, r#"{"p":1,"delta":[1.0],"gamma":[0.0],"dt":1.0,"dist":"normal"}"#).unwrap();
    let out = bin()
        .args(["var", path.to_str().unwrap(), "--gamma", "0.01", "--epsilon", "1e-4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sigma"), "stderr: {err}");
}

#[test]
fn loose_epsilon_exits_3_naming_variant() {
    let dir = tmp_dir("loose");
    let path = dir.join("model.json");
    fs::write(&path, GAUSSIAN_MODEL).unwrap();
    let out = bin()
        .args(["var", path.to_str().unwrap(), "--gamma", "0.01", "--epsilon", "0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("ToleranceTooLoose"), "stderr: {err}");
}

#[test]
fn cdf_gaussian_at_zero() {
    let dir = tmp_dir("cdf");
    let path = dir.join("model.json");
    fs::write(&path, GAUSSIAN_MODEL).unwrap();
    let out = bin()
        .args(["cdf", path.to_str().unwrap(), "--x", "0.0", "--epsilon", "1e-3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let p: f64 = field(&text, "p").parse().unwrap();
    assert!((p - 0.5).abs() <= 1e-3);
}

#[test]
fn simulate_reproducible_and_small_variant() {
    let dir = tmp_dir("sim");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = bin()
            .args([
                "simulate",
                "--seed",
                "5",
                "--options",
                "100",
                "--out",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("p=30"));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    // a simulated model must be directly consumable by the var command
    let out = bin()
        .args(["var", a.to_str().unwrap(), "--gamma", "0.01", "--epsilon", "1e-4"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn benchmark_writes_csvs() {
    let dir = tmp_dir("bench");
    let out = bin()
        .args([
            "benchmark",
            "--epsilons",
            "1e-3,1e-4",
            "--seed",
            "3",
            "--reps",
            "10",
            "--rho",
            "0.5",
            "--mc-max-m",
            "100000",
            "--out-dir",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let fourier = fs::read_to_string(dir.join("fourier.csv")).unwrap();
    let mut lines = fourier.lines();
    assert_eq!(lines.next(), Some("epsilon,n_terms,time_s"));
    assert_eq!(lines.count(), 2);

    let mc = fs::read_to_string(dir.join("mc.csv")).unwrap();
    assert!(mc.starts_with("epsilon,m_samples,time_s\n"));
    // at rho=0.5, required samples for 1e-3 fit the cap; check the M column
    let m_col: usize = mc
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(m_col > 0);

    let fig1 = fs::read_to_string(dir.join("fig1.csv")).unwrap();
    assert!(fig1.starts_with("m,eps_experimental,eps_theoretical\n"));
    assert!(fig1.lines().count() >= 8);
}

#[test]
fn thread_env_does_not_change_results() {
    let dir = tmp_dir("threads");
    let path = dir.join("model.json");
    fs::write(
        &path,
        r#"{"p":2,"sigma":{"diag":[1.0,1.0]},"delta":[0.5,0.5],
            "gamma":{"diag":[1.0,-0.5]},"dt":1.0,"dist":"normal"}"#,
    )
    .unwrap();
    let mut results = Vec::new();
    for threads in ["1", "4"] {
        let out = bin()
            .env("DGVAR_THREADS", threads)
            .args(["var", path.to_str().unwrap(), "--gamma", "0.05", "--epsilon", "1e-4"])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        results.push(field(&text, "var").to_string());
    }
    assert_eq!(results[0], results[1]);
}
