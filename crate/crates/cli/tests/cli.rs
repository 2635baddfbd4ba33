use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eigenrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eigenrate"))
        .args(args)
        .env_remove("EIGENRATE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV output, header comments and column line removed.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn wishart_rate_curve_matches_closed_form() {
    let text = stdout(&eigenrate(&["rate", "--dist", "normal", "--alpha-grid", "0.1:5:0.1"]));
    assert!(text.starts_with("# eigenrate "));
    assert!(text.contains("# config: {\"command\":\"rate\""));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 50);
    for row in rows {
        let alpha: f64 = row[2].parse().unwrap();
        let rate: f64 = row[3].parse().unwrap();
        assert!((rate - 0.5 * (alpha - 1.0 - alpha.ln())).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn phase_for_three_users() {
    let rows = csv_rows(&stdout(&eigenrate(&["phase", "--k", "3"])));
    assert_eq!(rows.len(), 1);
    let alpha: f64 = rows[0][1].parse().unwrap();
    assert!((alpha - 0.425).abs() < 0.015);
}

#[test]
fn domain_errors_exit_3_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = eigenrate(&[
        "rate",
        "--dist",
        "normal",
        "--alpha",
        "-1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!path.exists());
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "domain");
    assert_eq!(record["exit_code"], 3);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["rate", "--dist", "cauchy", "--alpha", "1"],
        vec!["rate", "--dist", "normal", "--alpha-grid", "1:2"],
        vec!["mc", "--dist", "normal", "--k", "2", "--n", "10", "--trials", "10"],
        vec!["covering", "--k", "3"],
        vec!["frobnicate"],
    ] {
        let out = eigenrate(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = [
        "mc", "--dist", "uniform", "--k", "3", "--n", "10,20", "--alpha-grid", "1.5:2:0.25",
        "--trials", "5000", "--seed", "9",
    ];
    let a = eigenrate(&args);
    let b = eigenrate(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let other = eigenrate(&[
        "mc", "--dist", "uniform", "--k", "3", "--n", "10,20", "--alpha-grid", "1.5:2:0.25",
        "--trials", "5000", "--seed", "10",
    ]);
    assert_ne!(stdout(&a), stdout(&other));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_eigenrate"));
        cmd.args(["sdpic", "--k", "3", "--n", "8", "--trials", "2000"]);
        match seed {
            Some(s) => cmd.env("EIGENRATE_SEED", s),
            None => cmd.env_remove("EIGENRATE_SEED"),
        };
        stdout(&cmd.output().unwrap())
    };
    let with_env = run(Some("77"));
    assert!(with_env.contains("\"seed\":77"));
    assert!(run(None).contains("\"seed\":1"));
    assert_eq!(with_env, run(Some("77")));
}

#[test]
fn replay_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.jsonl");
    let second = dir.path().join("second.jsonl");
    stdout(&eigenrate(&[
        "zero",
        "--k",
        "3",
        "--l",
        "2",
        "--n",
        "4..9",
        "--trials",
        "20000",
        "--output",
        first.to_str().unwrap(),
    ]));
    stdout(&eigenrate(&[
        "replay",
        first.to_str().unwrap(),
        "--output",
        second.to_str().unwrap(),
    ]));
    let a = std::fs::read_to_string(&first).unwrap();
    assert_eq!(a, std::fs::read_to_string(&second).unwrap());
    // Six n values plus the header record.
    assert_eq!(a.lines().count(), 7);
    let last: Value = serde_json::from_str(a.lines().last().unwrap()).unwrap();
    assert_eq!(last["method"], "mc");
    assert_eq!(last["n"], 9);
}

#[test]
fn zero_eigenvalue_exact_points() {
    let text = stdout(&eigenrate(&["zero", "--k", "2", "--n", "10"]));
    let rec: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["method"], "exact");
    assert_eq!(rec["p"].as_f64().unwrap(), 2f64.powi(-9));
    let expect = 0.9 * std::f64::consts::LN_2;
    assert!((rec["empirical_rate"].as_f64().unwrap() - expect).abs() < 1e-12);
}

fn write(path: &Path, out: Output) {
    std::fs::write(path, stdout(&out)).unwrap();
}

#[test]
fn compare_joins_rate_and_monte_carlo() {
    let dir = tempfile::tempdir().unwrap();
    let rate = dir.path().join("rate.csv");
    let mc = dir.path().join("mc.jsonl");
    write(
        &rate,
        eigenrate(&["rate", "--dist", "normal", "--k", "2", "--alpha-grid", "0.9:1.4:0.1"]),
    );
    write(
        &mc,
        eigenrate(&[
            "mc", "--dist", "normal", "--k", "2", "--n", "400", "--alpha-grid", "1:1.3:0.3",
            "--trials", "100000", "--seed", "3",
        ]),
    );
    let text = stdout(&eigenrate(&["compare", rate.to_str().unwrap(), mc.to_str().unwrap()]));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    // alpha = 1: zero rate, empirical rate near zero.
    assert_eq!(rows[0][3], "1.0");
    assert_eq!(rows[0][5], "0.0");
    assert!(rows[0][8].parse::<f64>().unwrap() < 0.01);
    assert_eq!(rows[0][11], "contained");
    assert_eq!(rows[1][3], "1.3");
    assert_eq!(rows[1][11], "contained");

    let unrelated = dir.path().join("other.jsonl");
    write(
        &unrelated,
        eigenrate(&[
            "mc", "--dist", "normal", "--k", "2", "--n", "50", "--alpha", "3.3", "--trials", "100",
        ]),
    );
    let out = eigenrate(&["compare", rate.to_str().unwrap(), unrelated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn sdpic_records_and_trace() {
    let text = stdout(&eigenrate(&[
        "sdpic", "--k", "4", "--n", "32", "--s", "2", "--trials", "5000",
    ]));
    let rec: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["violations"], 0);
    assert_eq!(rec["s"], "2");
    let any = rec["any_user_errors"].as_u64().unwrap();
    let per_user: Vec<u64> = rec["per_user_errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(per_user.iter().all(|&c| c <= any));
    assert!(any <= per_user.iter().sum());

    let trace = stdout(&eigenrate(&["sdpic", "--k", "3", "--n", "16", "--s", "5", "--trace"]));
    assert!(trace.contains("# lambda_max: "));
    let rows = csv_rows(&trace);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], "1");
}

#[test]
fn histogram_and_covering() {
    let text = stdout(&eigenrate(&[
        "hist", "--dist", "rademacher", "--k", "20", "--n", "200", "--trials", "500", "--bins",
        "20",
    ]));
    let outside: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# outside_fraction: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(outside <= 0.01);
    let mass: f64 = csv_rows(&text).iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((mass - 1.0).abs() < 1e-9);

    let rows = csv_rows(&stdout(&eigenrate(&["covering", "--k", "4", "--grid", "10"])));
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.6).abs() < 1e-15);
    assert!((rows[0][3].parse::<f64>().unwrap() - 4.0 * 10f64.ln()).abs() < 1e-12);
}

#[test]
fn jsonl_format_override() {
    let text = stdout(&eigenrate(&[
        "rate", "--dist", "rademacher", "--k", "3", "--alpha", "4", "--format", "jsonl",
    ]));
    let rec: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["rate"], "inf");
}
