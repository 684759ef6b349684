//! End-to-end runs of the `longmem` binary.

use std::path::Path;
use std::process::{Command, Output};

use longmem::cli::{AnalysisResult, BlueResult};
use longmem::estimate::fit_qmle;
use longmem::montecarlo::MCReport;
use longmem::{Bounds, Family, FitResult, Series};

fn longmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longmem")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate_to(path: &Path, extra: &[&str]) {
    let mut args = vec!["simulate", "--out", p(path)];
    args.extend_from_slice(extra);
    let out = longmem(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_then_fit_recovers_d() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    simulate_to(&csv, &["--d", "0.3", "--n", "3000", "--seed", "8"]);

    let out = longmem(&["fit", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let fit: FitResult = serde_json::from_slice(&out.stdout).unwrap();
    assert!((fit.d_hat() - 0.3).abs() < 0.05, "{}", fit.d_hat());

    // the JSON is exactly the library fit
    let series = Series::read_csv_path(&csv).unwrap();
    let lib = fit_qmle(&series, Family::Farima00, &Bounds::default()).unwrap();
    assert_eq!(fit, lib);
}

#[test]
fn simulate_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["--family", "LM", "--d", "0.25", "--n", "200", "--seed", "4", "--mu", "1.5"];
    simulate_to(&a, &args);
    simulate_to(&b, &args);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let s = Series::read_csv_path(&a).unwrap();
    assert_eq!(s.len(), 200);
}

#[test]
fn fit_with_stderr_and_whittle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    simulate_to(&csv, &["--family", "FARIMA10", "--d", "0.2", "--alpha", "0.5", "--n", "1000", "--seed", "2"]);
    let json = dir.path().join("fit.json");
    let out = longmem(&["fit", p(&csv), "--family", "FARIMA10", "--estimator", "whittle", "--stderr", "--out", p(&json)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let fit: FitResult = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(fit.gamma_hat.len(), 2);
    let se = fit.stderr.unwrap();
    assert_eq!(se.len(), 3);
    assert!(se.iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // validation errors
    assert_eq!(longmem(&["simulate", "--d", "0.7", "--n", "10"]).status.code(), Some(1));
    assert_eq!(longmem(&["fit", p(&dir.path().join("missing.csv"))]).status.code(), Some(1));
    assert_eq!(longmem(&["bogus"]).status.code(), Some(1));
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1.0\nabc\n").unwrap();
    assert_eq!(longmem(&["fit", p(&bad)]).status.code(), Some(1));

    // a vanishing series cannot be fitted
    let zeros = dir.path().join("zeros.csv");
    std::fs::write(&zeros, "0\n".repeat(50)).unwrap();
    assert_eq!(longmem(&["fit", p(&zeros)]).status.code(), Some(2));
    assert_eq!(longmem(&["fit", p(&zeros), "--estimator", "whittle"]).status.code(), Some(2));

    assert_eq!(longmem(&["--help"]).status.code(), Some(0));
}

#[test]
fn blue_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    simulate_to(&csv, &["--d", "0.35", "--n", "1700", "--seed", "12", "--mu", "10"]);

    let out = longmem(&["blue", p(&csv), "--d", "0.35"]);
    assert_eq!(out.status.code(), Some(0));
    let b: BlueResult = serde_json::from_slice(&out.stdout).unwrap();
    assert!(b.fit.is_none());
    assert!((b.mu_blue - 10.0).abs() < 1.0);

    let out = longmem(&["analyze", p(&csv), "--detrend"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let a: AnalysisResult = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(a.fits.len(), 2);
    assert!(a.trend.is_some());
    assert!(a.fits.iter().all(|f| f.stderr.is_some()));
}

#[test]
fn mc_writes_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mc.json");
    std::fs::write(
        &cfg,
        r#"{"family": "FARIMA00", "theta_grid": [{"gamma": [0.2], "sigma2": 4.0}],
            "n_grid": [200], "replications": 8, "estimators": ["qmle", "whittle"], "base_seed": 3}"#,
    )
    .unwrap();
    let report = dir.path().join("report.json");
    let table = dir.path().join("table.csv");
    let out = longmem(&[
        "mc", "--config", p(&cfg), "--workers", "2", "--out", p(&report), "--table", "csv", "--table-out", p(&table),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: MCReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert!(r.rows.iter().all(|row| row.successes + row.failures == 8));
    let t = std::fs::read_to_string(&table).unwrap();
    assert!(t.starts_with("n,estimator,"));
    assert_eq!(t.lines().count(), 3);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"family": "FARIMA00", "theta_grid": [], "replications": 2}"#).unwrap();
    assert_eq!(longmem(&["mc", "--config", p(&bad)]).status.code(), Some(1));
}
