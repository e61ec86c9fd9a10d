use std::path::PathBuf;
use std::process::{Command, Output};

fn beurling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beurling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_spec(dir: &tempfile::TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn field(line: &str, i: usize) -> f64 {
    line.split(',').nth(i).unwrap().parse().unwrap()
}

#[test]
fn eval_cancels_below_one_half() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "s.json", r#"{"terms":[{"a_re":1,"b":1},{"a_re":-2,"b":2}]}"#);
    let o = beurling(&["eval", "--x", "0.4", "--spec", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert_eq!(field(row, 1), 0.0);
    assert_eq!(field(row, 3), 1.0);
}

#[test]
fn square_wave_coefficients() {
    let o = beurling(&["fourier", "--n-max", "2", "--method", "direct"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "n,re,im,method,L_or_J,certificate");
    assert!((field(rows[1], 1) - 4.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!(field(rows[2], 1).abs() < 1e-12);
}

#[test]
fn mellin_even_table() {
    let o = beurling(&["mellin-even", "--l-max", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert_eq!(field(row, 1), 0.5);
    assert!((field(row, 3) - 1.852904042138922).abs() < 1e-12);
    assert!(row.ends_with(",true"));
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = beurling(&["mellin", "--s", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["provenance"], "closed_form");
    assert!((v["value"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn routes_check_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "s.json",
        r#"{"terms":[{"a_re":1,"b":2},{"a_re":-1,"b":3},{"a_re":-1,"b":6}]}"#,
    );
    let s = spec.to_str().unwrap();
    let runs: Vec<String> = ["1", "2", "4"]
        .iter()
        .map(|t| {
            stdout(&beurling(&[
                "routes-check",
                "--n-max",
                "6",
                "--spec",
                s,
                "--threads",
                t,
            ]))
        })
        .collect();
    assert!(runs[0].lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
}

#[test]
fn optimize_and_gram_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("gram.json");
    let c = cache.to_str().unwrap();
    let args = [
        "optimize",
        "--thetas",
        "unit:3",
        "--n-max",
        "100",
        "--tol",
        "1e-8",
        "--gram-cache",
        c,
    ];
    let first = beurling(&args);
    assert!(first.status.success());
    assert!(cache.exists());
    let second = beurling(&args);
    assert_eq!(stdout(&first), stdout(&second));
    let v: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert!(v["gaps"]["quadratic_numeric"].as_f64().unwrap() < 1e-6);
}

#[test]
fn sweep_is_nonincreasing() {
    let o = beurling(&["sweep", "--unit-n-from", "1", "--unit-n-to", "6", "--tol", "1e-8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let q: Vec<f64> = out.lines().skip(1).map(|l| field(l, 1)).collect();
    assert_eq!(q[0], 1.0);
    assert!(q.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let big = write_spec(&dir, "big.json", r#"{"terms":[{"a_re":1,"b":1},{"a_re":-2,"b":2}]}"#);
    let bad = write_spec(&dir, "bad.json", r#"{"terms":[{"a_re":1,"b":0}]}"#);
    let code = |args: &[&str]| beurling(args).status.code().unwrap();
    assert_eq!(code(&["eval", "--x", "1.5"]), 2);
    assert_eq!(code(&["eval", "--x", "0.3", "--spec", bad.to_str().unwrap()]), 2);
    assert_eq!(
        code(&[
            "fourier",
            "--n-max",
            "2",
            "--method",
            "even-mellin",
            "--spec",
            big.to_str().unwrap()
        ]),
        2
    );
    assert_eq!(code(&["eval", "--x", "0.3", "--spec", "/nonexistent/spec.json"]), 1);
    assert_eq!(code(&["fourier"]), 2);
    assert_eq!(code(&["optimize", "--thetas", "unit:2,unit:2"]), 2);
}
