use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn fracspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn assert_schema(v: &Value, command: &str) {
    assert_eq!(v["command"], command);
    assert!(v["inputs"].is_object());
    assert!(v["results"].is_object());
    assert!(v["seed"].is_u64());
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let ts = v["timestamp"].as_str().unwrap();
    assert!(chrono::DateTime::parse_from_rfc3339(ts).is_ok(), "{ts}");
    for c in v["checks"].as_array().unwrap() {
        assert!(c["name"].is_string());
        assert!(c["pass"].is_boolean());
        assert!(c["value"].is_number());
        assert!(c["bound"].is_number());
    }
}

#[test]
fn spectrum_example() {
    let out = fracspec(&["spectrum", "--backend", "interval-analytic", "--length", "3.14159265358979", "--modes", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v, "spectrum");
    let ev: Vec<f64> = v["results"]["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in ev.iter().zip([1.0, 4.0, 9.0]) {
        assert!((got - want).abs() < 1e-10);
    }
    assert_eq!(v["inputs"]["modes"], 3);
}

#[test]
fn energy_check_example() {
    let out = fracspec(&["energy-check", "--backend", "interval-analytic", "--modes", "20", "--s", "0.5", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v, "energy-check");
    let r = &v["results"];
    assert!(r["lhs"].is_number() && r["rhs"].is_number());
    assert!(r["rel_err"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["seed"], 7);
}

#[test]
fn dtn_check_example() {
    let out = fracspec(&["dtn-check", "--s", "0.5", "--lambda", "4", "--c0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema(&v, "dtn-check");
    assert!((v["results"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-5);
}

#[test]
fn validation_errors_exit_one() {
    let cases: [&[&str]; 6] = [
        &["energy-check", "--backend", "interval-analytic", "--modes", "5", "--s", "1.5"],
        &["spectrum", "--backend", "no_such_backend"],
        &["spectrum", "--backend", "grushin_fd", "--length", "2", "--grid", "15", "--gamma", "1"],
        &["spectrum"],
        &["not-a-command"],
        &["spectrum", "--backend", "interval_fd", "--length", "1", "--grid", "abc"],
    ];
    for args in cases {
        let out = fracspec(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_two() {
    let out = fracspec(&["energy-check", "--backend", "interval-analytic", "--modes", "5", "--s", "0.4", "--tmax", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tail"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(fracspec(&["--help"]).status.code(), Some(0));
}

#[test]
fn csv_has_header_and_one_row_per_rank() {
    let out = fracspec(&[
        "compactness", "--backend", "interval-analytic", "--modes", "6", "--s", "0.5", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().unwrap().clone();
    assert_eq!(&header[0], "rank");
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), n);
        let modulus: f64 = row[1].parse().unwrap();
        assert!((modulus - ((n + 1) as f64).powf(-0.5)).abs() < 1e-12);
    }
}

#[test]
fn spectrum_csv_rows() {
    let out = fracspec(&["spectrum", "--backend", "interval_fd", "--length", "1", "--grid", "7", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,eigenvalue");
    assert_eq!(lines.len(), 8);
}

#[test]
fn input_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let mut file = std::fs::File::create(&input).unwrap();
    let n = 9;
    for i in 1..=n {
        let x = i as f64 / (n + 1) as f64;
        writeln!(file, "{}", (std::f64::consts::PI * x).sin()).unwrap();
    }
    drop(file);
    let out_path = dir.path().join("report.json");
    let out = fracspec(&[
        "frac-apply", "--backend", "interval_fd", "--length", "1", "--grid", "9", "--s", "0.5",
        "--input", input.to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_schema(&v, "frac-apply");
    assert!(v["inputs"].get("out").is_none());
}

#[test]
fn magnetic_input_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.csv");
    let mut file = std::fs::File::create(&input).unwrap();
    for i in 0..16 {
        writeln!(file, "{}, {}", 1.0 + 0.1 * i as f64, -0.05 * i as f64).unwrap();
    }
    drop(file);
    let out = fracspec(&[
        "diamagnetic-check", "--backend", "magnetic_fd", "--length", "5", "--grid", "4", "--flux", "0.6",
        "--input", input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_schema(&v, "diamagnetic-check");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn every_subcommand_produces_a_report() {
    let cases: [&[&str]; 6] = [
        &["extension-eval", "--backend", "interval-analytic", "--modes", "8", "--s", "0.3", "--t", "0.5"],
        &["compactness", "--backend", "box2d_fd", "--length", "1", "--grid", "6", "--s", "0.4", "--seed", "3"],
        &["tail-check", "--backend", "oscillator_fd", "--length", "10", "--grid", "400", "--radius", "2", "--q", "4"],
        &["tail-check", "--backend", "oscillator_analytic", "--modes", "20", "--radius", "1.5"],
        &["diamagnetic-check", "--backend", "magnetic_fd", "--length", "5", "--grid", "6", "--flux", "-0.4", "--seed", "2"],
        &["energy-check", "--backend", "magnetic_fd", "--length", "3", "--grid", "5", "--flux", "0.3", "--s", "0.7"],
    ];
    for args in cases {
        let out = fracspec(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_schema(&json(&out), args[0]);
    }
}

#[test]
fn identical_argv_identical_bytes() {
    let args = ["compactness", "--backend", "interval-analytic", "--modes", "12", "--s", "0.3", "--seed", "5"];
    let strip = |o: Output| {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(fracspec(&args)), strip(fracspec(&args)));
}
