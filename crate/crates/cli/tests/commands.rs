use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn embedlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embedlab"))
        .args(args)
        .env_remove("EMBEDLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn matrix_file(dir: &TempDir, name: &str, d: usize, entries: &[f64]) -> PathBuf {
    let path = dir.path().join(name);
    let body = serde_json::json!({
        "d": d,
        "entries_row_major": entries,
        "convention": "column-stochastic",
    });
    std::fs::write(&path, body.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_identity_is_classical() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "id.json", 2, &[1.0, 0.0, 0.0, 1.0]);
    let out = embedlab(&["check", s(&m)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("classical generator L=0"));
}

#[test]
fn check_collapse_matrix_exits_one_with_certificate() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "c.json", 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let out = embedlab(&["check", s(&m), "--json"]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["decided_by"], "collapse_obstruction");
    assert_eq!(report["certificate_verified"], true);
    assert_eq!(report["certificate"]["kind"], "collapse_obstruction");
    assert_eq!(report["certificate"]["I0"], serde_json::json!([0]));
}

#[test]
fn check_interior_point_is_embeddable_or_inconclusive() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "p.json", 2, &[0.3, 0.6, 0.7, 0.4]);
    let out = embedlab(&["check", s(&m), "--restarts", "4", "--seed", "1", "--param", "reduced"]);
    let c = code(&out);
    assert!(c == 0 || c == 2, "exit {c}: {}", stderr(&out));
    if c == 0 {
        assert!(stdout(&out).contains("certificate re-verified: yes"));
    }
}

#[test]
fn malformed_inputs_exit_64() {
    let dir = TempDir::new().unwrap();
    let bad = matrix_file(&dir, "bad.json", 2, &[0.5, 0.2, 0.5, 0.9]);
    let out = embedlab(&["check", s(&bad)]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("column 2"), "{}", stderr(&out));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&embedlab(&["certify", s(&garbage)])), 64);

    let no_convention = dir.path().join("nc.json");
    std::fs::write(&no_convention, r#"{"d": 1, "entries_row_major": [1.0]}"#).unwrap();
    assert_eq!(code(&embedlab(&["check", s(&no_convention)])), 64);
}

#[test]
fn missing_file_is_an_io_error() {
    let out = embedlab(&["certify", "/nonexistent/m.json"]);
    assert_eq!(code(&out), 74);
    assert!(stderr(&out).contains("/nonexistent/m.json"));
}

#[test]
fn certify_reports() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "t1.json", 2, &[1e-7, 0.5, 1.0 - 1e-7, 0.5]);
    let out = embedlab(&["certify", s(&m)]);
    assert_eq!(code(&out), 1);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["decided_by"], "small_diagonal_region");
    assert_eq!(r["certificate"]["in_Q2_complement"], true);
    assert_eq!(r["classical"], false);

    let (p, q) = (0.3, 0.7);
    #[rustfmt::skip]
    let fam = matrix_file(&dir, "fam.json", 4, &[
        1.0, 1.0, 1.0, 0.0,
        0.0, 0.0, 0.0, p,
        0.0, 0.0, 0.0, q,
        0.0, 0.0, 0.0, 0.0,
    ]);
    let r: Value = serde_json::from_str(&stdout(&embedlab(&["certify", s(&fam)]))).unwrap();
    assert_eq!(r["decided_by"], "collapse_obstruction");

    let id = matrix_file(&dir, "id.json", 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let out = embedlab(&["certify", s(&id)]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["classical"], true);
    let blocking = r["attempts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["outcome"] == "not_embeddable")
        .count();
    assert_eq!(blocking, 0);
}

#[test]
fn classify_extreme_counts() {
    for (d, n, total) in [("2", "4", "4"), ("3", "21", "27"), ("4", "148", "256")] {
        let out = embedlab(&["classify-extreme", "--d", d, "--json"]);
        assert_eq!(code(&out), 0);
        let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!((r["embeddable"].as_str(), r["total"].as_str()), (Some(n), Some(total)));
    }
    let out = embedlab(&["classify-extreme", "--d", "3", "--list-non-embeddable"]);
    let text = stdout(&out);
    assert!(text.contains("n(d) = 21") && text.contains("non-embeddable matrices: 6"));
    assert!(text.contains("images (2 2 1)"));
    let out = embedlab(&["classify-extreme", "--d", "2", "--list-non-embeddable"]);
    assert!(stdout(&out).contains("non-embeddable matrices: 0"));
}

#[test]
fn classify_extreme_guards() {
    assert_eq!(code(&embedlab(&["classify-extreme", "--d", "9"])), 69);
    assert_eq!(code(&embedlab(&["classify-extreme", "--d", "7", "--list-non-embeddable"])), 69);
}

fn scan_csv(dir: &TempDir, name: &str, threads: Option<&str>) -> String {
    let out_path = dir.path().join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_embedlab"));
    cmd.args(["scan-qubit", "--grid", "3", "--restarts", "8", "--seed", "5", "--out"])
        .arg(&out_path);
    match threads {
        Some(n) => cmd.env("EMBEDLAB_THREADS", n),
        None => cmd.env_remove("EMBEDLAB_THREADS"),
    };
    let out = cmd.output().unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    std::fs::read_to_string(out_path).unwrap()
}

#[test]
fn scan_is_deterministic_and_ordered() {
    let dir = TempDir::new().unwrap();
    let a = scan_csv(&dir, "a.csv", None);
    let b = scan_csv(&dir, "b.csv", Some("1"));
    let c = scan_csv(&dir, "c.csv", Some("3"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "a,b,best_objective,verdict,classical,theorem1_blocked,seed");
    assert_eq!(lines.len(), 10);
    let coords: Vec<(String, String)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[1].to_owned())
        })
        .collect();
    assert_eq!(coords[1], ("0.0".into(), "0.5".into()));
    assert_eq!(coords[3], ("0.5".into(), "0.0".into()));
    // corners: (0,0), (0,1), (1,0), (1,1)
    for k in [0, 2, 6, 8] {
        assert!(lines[k + 1].contains("embeddable_at_delta"), "{}", lines[k + 1]);
    }
    // edge point (0, 0.5) is blocked
    assert!(lines[2].contains(",not_embeddable,false,true,"), "{}", lines[2]);
}

#[test]
fn scan_errors() {
    let out = embedlab(&["scan-qubit", "--grid", "2", "--out", "/nonexistent/dir/s.csv"]);
    assert_eq!(code(&out), 74);
    assert!(stderr(&out).contains("/nonexistent/dir/s.csv"));
    assert_eq!(code(&embedlab(&["scan-qubit", "--grid", "1", "--out", "/tmp/x.csv"])), 64);
}

#[test]
fn bad_thread_variable_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_embedlab"))
        .args(["classify-extreme", "--d", "2"])
        .env("EMBEDLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 64);
}

fn construct(target: &Path, extra: &[&str]) -> (i32, Value, String) {
    let mut args = vec!["embed-construct", "--target", s(target)];
    args.extend_from_slice(extra);
    let out = embedlab(&args);
    let json = serde_json::from_str(&stdout(&out)).unwrap_or(Value::Null);
    (code(&out), json, stderr(&out))
}

#[test]
fn construct_swap_via_unitary() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "swap.json", 2, &[0.0, 1.0, 1.0, 0.0]);
    let (c, r, _) = construct(&m, &["--method", "unitary"]);
    assert_eq!(c, 0);
    assert!(r["objective"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["lindbladian"]["dim"], 2);
    assert!(r["lindbladian"]["H"].is_array());
}

#[test]
fn construct_copied_column_improves_with_gamma() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "t3.json", 3, &[0.7, 0.2, 0.2, 0.3, 0.8, 0.8, 0.0, 0.0, 0.0]);
    let obj = |g: &str| {
        let (c, r, e) = construct(&m, &["--method", "theorem3", "--gamma", g, "--tf", "1"]);
        assert_eq!(c, 0, "{e}");
        r["objective"].as_f64().unwrap()
    };
    let (lo, mid, hi) = (obj("100"), obj("1000"), obj("10000"));
    assert!(mid < 1e-2 && lo > mid && mid > hi, "{lo} {mid} {hi}");
}

#[test]
fn construct_rate_file_via_lift() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("rates.json");
    let body = serde_json::json!({
        "d": 3,
        "entries_row_major": [-1.0, 0.5, 0.0, 1.0, -1.5, 2.0, 0.0, 1.0, -2.0],
        "convention": "rate-matrix",
        "time": 0.8,
    });
    std::fs::write(&path, body.to_string()).unwrap();
    let (c, r, _) = construct(&path, &["--method", "classical-lift"]);
    assert_eq!(c, 0);
    assert!(r["objective"].as_f64().unwrap() < 1e-9);
}

#[test]
fn construct_structural_mismatch_explains() {
    let dir = TempDir::new().unwrap();
    let m = matrix_file(&dir, "nc.json", 3, &[0.7, 0.2, 0.5, 0.3, 0.8, 0.5, 0.0, 0.0, 0.0]);
    let (c, _, err) = construct(&m, &["--method", "theorem3"]);
    assert_eq!(c, 64);
    assert!(err.contains("not a copy"), "{err}");
}
