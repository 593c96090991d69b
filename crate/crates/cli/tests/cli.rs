//! End-to-end checks of the installed binary: artifact shape, replay
//! round-trips, determinism, and error categories.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reset-search"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 artifact")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("reset-search-cli-test-{}-{name}", std::process::id()));
    path
}

#[test]
fn eig1d_emits_header_metadata_and_solution() {
    let text = run_ok(&["eig1d", "--D", "1", "--r", "1", "--a", "1"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# command: eig1d");
    assert!(lines.contains(&"# replay: eig1d --D 1 --r 1 --a 1 --format csv"));
    let header = lines.iter().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        *header,
        "a [length],lambda0 [1/time],q [1/length],m [dimensionless],residual [1/time]"
    );
    let row: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // lambda0 solves lambda = r exp(-a sqrt(2 (r - lambda) / D)).
    let (lambda0, q, m) = (row[1], row[2], row[3]);
    assert!((lambda0 - (-q).exp()).abs() < 1e-14);
    assert!((q - (2.0 * (1.0 - lambda0)).sqrt()).abs() < 1e-14);
    assert!(m > 1.0, "prefactor at a = sqrt(D/2r) exceeds 1");
}

#[test]
fn replay_line_reproduces_the_artifact() {
    let args = [
        "target-fail", "--dist", "gaussian", "--sigma", "1", "--D", "1", "--r", "1", "--t",
        "1e2,1e3",
    ];
    let first = run_ok(&args);
    let replay_line = first
        .lines()
        .find_map(|l| l.strip_prefix("# replay: "))
        .expect("replay line present");
    let replayed_args: Vec<&str> = replay_line.split_whitespace().collect();
    let second = run_ok(&replayed_args);
    assert_eq!(first, second, "replayed artifact must be byte-identical");
}

#[test]
fn identical_seeds_give_byte_identical_files() {
    let args = |path: &str| {
        vec![
            "compare".to_string(),
            "--D".into(), "1".into(), "--r".into(), "1".into(),
            "--a".into(), "1".into(), "--t".into(), "2,4".into(),
            "--n".into(), "20000".into(), "--seed".into(), "7".into(),
            "--out".into(), path.into(),
        ]
    };
    let (path_a, path_b) = (tmp_path("det-a.csv"), tmp_path("det-b.csv"));
    for (path, name) in [(&path_a, "a"), (&path_b, "b")] {
        let out = binary()
            .args(args(path.to_str().unwrap()))
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "run {name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    std::fs::remove_file(&path_a).ok();
    std::fs::remove_file(&path_b).ok();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn json_artifact_parses_with_meta_and_rows() {
    let text = run_ok(&[
        "survival", "--D", "1", "--r", "1", "--a", "2", "--t", "5,10", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["meta"]["command"], "survival");
    assert_eq!(doc["meta"]["params"]["a"], "2");
    assert!(doc["meta"]["notes"]["lambda0"].is_string());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    let p = doc["rows"][0][1].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
}

#[test]
fn thread_count_does_not_change_simulation_bytes() {
    let args = [
        "simulate", "--D", "1", "--r", "1", "--a", "1", "--t", "1,3", "--n", "30000", "--seed",
        "11",
    ];
    let single = binary()
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("binary runs");
    let quad = binary()
        .args(args)
        .env("RAYON_NUM_THREADS", "4")
        .output()
        .expect("binary runs");
    assert!(single.status.success() && quad.status.success());
    assert_eq!(single.stdout, quad.stdout);
}

#[test]
fn error_categories_map_to_exit_codes() {
    // Usage: unknown flag.
    let out = run(&["eig1d", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[usage]"));

    // Usage: inconsistent flag combination.
    let out = run(&["simulate", "--D", "1", "--r", "1", "--a", "1", "--t", "2", "--n", "10",
        "--seed", "1", "--dt", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[usage]"));

    // Domain: module precondition.
    let out = run(&["eig1d", "--D", "-1", "--r", "1", "--a", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[domain]"));

    // IO: unwritable output path.
    let out = run(&["eig1d", "--D", "1", "--r", "1", "--a", "1", "--out",
        "/nonexistent-dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[io]"));
}

#[test]
fn sweep_syntax_produces_one_row_per_value() {
    let text = run_ok(&["eig1d", "--D", "1", "--r", "1", "--a", "1:4:3"]);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3);
    let first: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    let last: f64 = rows[2].split(',').next().unwrap().parse().unwrap();
    assert_eq!(first, 1.0);
    assert_eq!(last, 4.0);
}
