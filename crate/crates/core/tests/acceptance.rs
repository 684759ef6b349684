//! Acceptance suite. Every criterion prints one `criterion N: PASS|FAIL` line
//! and the run exits nonzero if any criterion fails.

use std::f64::consts::PI;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use longmem::estimate::{
    asymptotic_covariance, blue_efficiency, blue_mean, fit_qmle, periodogram_full, qmle_gradient, qmle_objective,
    whittle_information, Estimator,
};
use longmem::models::{ar_coeffs, autocovariance, autocovariance_by_convolution, CoeffTable};
use longmem::montecarlo::{run_mc, run_mean_mc, Cell, MCConfig, MCReport};
use longmem::simulate::{simulate, GenConfig};
use longmem::{Bounds, Family, ModelSpec, Series};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn specs_for(family: Family, d: f64) -> Vec<ModelSpec> {
    match family {
        Family::Farima10 => [0.0, 0.5, 0.9].iter().map(|&a| ModelSpec::farima10(d, a, 1.0).unwrap()).collect(),
        Family::Farima00 => vec![ModelSpec::farima00(d, 1.0).unwrap()],
        Family::Lm => vec![ModelSpec::lm(d, 1.0).unwrap()],
    }
}

fn catalogue(ds: &[f64]) -> Vec<ModelSpec> {
    Family::ALL.iter().flat_map(|&f| ds.iter().flat_map(move |&d| specs_for(f, d))).collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in catalogue(&[0.1, 0.2, 0.3, 0.4, 0.49]) {
        worst = worst.max(CoeffTable::new(&spec, 500).unwrap().convolution_defect());
    }
    outcome(worst <= 1e-10, format!("max convolution defect {worst:.2e} (<= 1e-10)"))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.1, 0.3, 0.45] {
        let spec = ModelSpec::farima00(d, 1.0).unwrap();
        let closed = autocovariance(&spec, 100).unwrap();
        let conv = autocovariance_by_convolution(&spec, 100, 100_000).unwrap();
        for (a, b) in closed.iter().zip(&conv) {
            worst = worst.max(((a - b) / a).abs());
        }
    }
    outcome(worst <= 1e-4, format!("max relative error {worst:.2e} (<= 1e-4)"))
}

/// Least-squares slope of `log |y_k|` on `log k` over `k ∈ [lo, hi]`,
/// sampled on a geometric grid.
fn loglog_slope(y: &[f64], lo: usize, hi: usize) -> f64 {
    let ks: Vec<usize> = (0..=40)
        .map(|i| (lo as f64 * (hi as f64 / lo as f64).powf(i as f64 / 40.0)).round() as usize)
        .collect();
    let lx: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let ly: Vec<f64> = ks.iter().map(|&k| y[k].abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>()
}

fn slope_errors(specs: &[ModelSpec]) -> (f64, f64) {
    let (mut worst_u, mut worst_r): (f64, f64) = (0.0, 0.0);
    for spec in specs {
        let u = ar_coeffs(spec, 10_000).unwrap();
        let r = autocovariance(spec, 10_000).unwrap();
        worst_u = worst_u.max((loglog_slope(&u, 100, 10_000) + 1.0 + spec.d).abs());
        worst_r = worst_r.max((loglog_slope(&r, 100, 10_000) - (2.0 * spec.d - 1.0)).abs());
    }
    (worst_u, worst_r)
}

/// Checked on FARIMA00, LM and FARIMA10 with α ∈ {0, 0.5}. The returned
/// extra line reports α = 0.9, where `u_k ∝ k^{-1-d} (1 - (1+d)/((1-α)k))`
/// is still far from its power law at k = 10².
fn criterion_3() -> (Outcome, Outcome) {
    let ds = [0.1, 0.2, 0.3, 0.4];
    let (near, far): (Vec<ModelSpec>, Vec<ModelSpec>) =
        catalogue(&ds).into_iter().partition(|s| s.family != Family::Farima10 || s.gamma()[1] < 0.6);
    let (u, r) = slope_errors(&near);
    let main = outcome(u <= 0.02 && r <= 0.05, format!("max slope error u {u:.4} (<= 0.02), r {r:.4} (<= 0.05)"));
    let (u9, r9) = slope_errors(&far);
    let extra = outcome(
        u9 <= 0.02 && r9 <= 0.05,
        format!("FARIMA10 alpha=0.9 (not asserted): max slope error u {u9:.4}, r {r9:.4}"),
    );
    (main, extra)
}

fn campaign(family: Family, cells: Vec<Cell>, n_grid: Vec<usize>, reps: usize, seed: u64) -> MCReport {
    let mut cfg = MCConfig::desk(family, cells);
    cfg.n_grid = n_grid;
    cfg.replications = reps;
    cfg.base_seed = seed;
    run_mc(&cfg, None).unwrap()
}

fn criterion_4(report: &MCReport) -> Outcome {
    let row = &report.rows[0];
    let d = row.coord("d").unwrap().sqrt_mse;
    let s2 = row.coord("sigma2").unwrap().sqrt_mse;
    outcome(
        (0.018..=0.032).contains(&d) && (0.13..=0.23).contains(&s2),
        format!("sqrt-MSE d {d:.4} in [0.018, 0.032], sigma2 {s2:.4} in [0.13, 0.23] (failures {})", row.failures),
    )
}

fn criterion_5() -> Outcome {
    let report = campaign(Family::Lm, vec![Cell::new(&[0.2], 4.0)], vec![1000], 300, 5);
    let d = report.rows[0].coord("d").unwrap().sqrt_mse;
    outcome((0.022..=0.043).contains(&d), format!("sqrt-MSE d {d:.4} in [0.022, 0.043]"))
}

fn criterion_6() -> Outcome {
    let report = campaign(Family::Farima10, vec![Cell::new(&[0.1, 0.5], 1.0)], vec![1000], 200, 6);
    let row = &report.rows[0];
    let d = row.coord("d").unwrap().sqrt_mse;
    let fr = row.failure_rate();
    outcome(
        (0.04..=0.09).contains(&d) && fr < 0.02,
        format!("sqrt-MSE d {d:.4} in [0.04, 0.09], failure rate {fr:.3} (< 0.02), boundary pinned {}", row.pinned),
    )
}

fn criterion_7() -> Outcome {
    let report = campaign(Family::Farima00, vec![Cell::new(&[0.2], 4.0)], vec![300, 3000], 300, 7);
    let small = report.row(0, 300, Estimator::Qmle).unwrap().coord("d").unwrap().sqrt_mse;
    let big = report.row(0, 3000, Estimator::Qmle).unwrap().coord("d").unwrap().sqrt_mse;
    let ratio = big / small;
    outcome((0.2..=0.45).contains(&ratio), format!("ratio {ratio:.3} ({big:.4}/{small:.4}) in [0.2, 0.45]"))
}

fn criterion_8(report: &MCReport) -> Outcome {
    let row = &report.rows[0];
    let n = row.n as f64;
    let d: Vec<f64> = row.raw.iter().map(|t| t[0]).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
    let spec = ModelSpec::farima00(0.2, 4.0).unwrap();
    let info = asymptotic_covariance(&spec, 3.0).unwrap();
    let theory = info.m_inv[0][0];
    let ratio = n * var / theory;

    let mut worst: f64 = 0.0;
    for spec in catalogue(&[0.1, 0.2, 0.3, 0.4]) {
        let m = asymptotic_covariance(&spec, 3.0).unwrap().m;
        let w = whittle_information(&spec).unwrap();
        for a in 0..m.len() {
            for b in 0..m.len() {
                worst = worst.max((m[a][b] - w[a][b]).abs() / (w[a][a] * w[b][b]).sqrt());
            }
        }
    }
    outcome(
        (ratio - 1.0).abs() <= 0.25 && worst <= 0.01,
        format!("n Var(d) / (M*)^-1 = {ratio:.3} (within 25%); max M* vs Whittle gap {worst:.2e} (<= 1%)"),
    )
}

fn criterion_9() -> Outcome {
    let report = campaign(Family::Farima00, vec![Cell::new(&[0.49], 4.0), Cell::new(&[0.3], 4.0)], vec![300], 200, 9);
    let near = report.row(0, 300, Estimator::Qmle).unwrap().coord("sigma2").unwrap().sqrt_mse;
    let mid = report.row(1, 300, Estimator::Qmle).unwrap().coord("sigma2").unwrap().sqrt_mse;
    let ratio = near / mid;
    outcome(ratio >= 1.5, format!("sqrt-MSE sigma2 ratio {ratio:.3} ({near:.4}/{mid:.4}) >= 1.5"))
}

/// Dense Cholesky solve of the Toeplitz system with first column `r`.
fn dense_solve(r: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = r[i.abs_diff(j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = if i == j { s.sqrt() } else { s / l[j * n + j] };
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i * n + i];
    }
    x
}

fn criterion_10() -> Outcome {
    let effs: Vec<f64> = (1..=9).map(|i| blue_efficiency(0.05 * i as f64).unwrap()).collect();
    let eff_ok = effs.iter().all(|e| (0.98..=1.0001).contains(e));
    let eff_min = effs.iter().cloned().fold(f64::INFINITY, f64::min);

    let spec = ModelSpec::farima00(0.3, 1.0).unwrap();
    let x = simulate(&spec.clone().with_mu(3.0), 500, &GenConfig::exact(10)).unwrap();
    let got = blue_mean(x.values(), &spec).unwrap();
    let r = autocovariance(&spec, 499).unwrap();
    let w = dense_solve(&r, &vec![1.0; 500]);
    let want = w.iter().zip(x.values()).map(|(a, b)| a * b).sum::<f64>() / w.iter().sum::<f64>();
    let dense_err = (got - want).abs();

    let rows = run_mean_mc(&spec.clone().with_mu(3.0), &[300, 1000, 3000], 300, 10, None).unwrap();
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled_sd_blue).collect();
    let avg = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let spread = scaled.iter().map(|s| (s / avg - 1.0).abs()).fold(0.0, f64::max);
    outcome(
        eff_ok && dense_err <= 1e-8 && spread <= 0.25,
        format!(
            "efficiency min {eff_min:.5} in [0.98, 1.0001]; dense solve gap {dense_err:.1e} (<= 1e-8); \
             scaled sd(BLUE) {scaled:.4?} within 25% of mean (max {spread:.3})"
        ),
    )
}

fn property(name: &str, cases: u32, f: impl FnOnce(&mut TestRunner) -> Result<(), String>) -> (bool, String) {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    match f(&mut runner) {
        Ok(()) => (true, format!("{name} ok")),
        Err(e) => (false, format!("{name} FAILED: {e}")),
    }
}

fn criterion_11() -> Outcome {
    let bounds = Bounds::default();
    let mut checks = Vec::new();

    checks.push(property("scale invariance", 6, |runner| {
        runner
            .run(&(0u64..1000, 0.2f64..20.0, 0.05f64..0.45), |(seed, c, d)| {
                let x = simulate(&ModelSpec::farima00(d, 1.0).unwrap(), 400, &GenConfig::exact(seed)).unwrap();
                let y = x.map(|v| c * v).unwrap();
                let fx = fit_qmle(&x, Family::Farima00, &bounds).unwrap();
                let fy = fit_qmle(&y, Family::Farima00, &bounds).unwrap();
                prop_assert!((fx.d_hat() - fy.d_hat()).abs() < 1e-6, "{} vs {}", fx.d_hat(), fy.d_hat());
                prop_assert!((fy.sigma2_hat / (c * c * fx.sigma2_hat) - 1.0).abs() < 1e-6);
                Ok(())
            })
            .map_err(|e| e.to_string())
    }));

    checks.push(property("sigma2 identity", 6, |runner| {
        runner
            .run(&(0u64..1000, 0.05f64..0.45), |(seed, d)| {
                let x = simulate(&ModelSpec::lm(d, 2.0).unwrap(), 400, &GenConfig::exact(seed)).unwrap();
                let fit = fit_qmle(&x, Family::Lm, &bounds).unwrap();
                let s = qmle_objective(&x, Family::Lm, &fit.gamma_hat).unwrap();
                prop_assert!((fit.sigma2_hat - s / 400.0).abs() <= 1e-12 * fit.sigma2_hat);
                Ok(())
            })
            .map_err(|e| e.to_string())
    }));

    checks.push(property("gradient vs finite differences", 8, |runner| {
        runner
            .run(&(0u64..1000, 0.05f64..0.45, -0.8f64..0.8, 0usize..3), |(seed, d, a, fi)| {
                let family = Family::ALL[fi];
                let x = simulate(&ModelSpec::farima10(0.25, 0.3, 1.0).unwrap(), 300, &GenConfig::exact(seed)).unwrap();
                let g = if family == Family::Farima10 { vec![d, a] } else { vec![d] };
                let grad = qmle_gradient(&x, family, &g).unwrap();
                for c in 0..g.len() {
                    let h = 1e-6;
                    let (mut gp, mut gm) = (g.clone(), g.clone());
                    gp[c] += h;
                    gm[c] -= h;
                    let fd = (qmle_objective(&x, family, &gp).unwrap() - qmle_objective(&x, family, &gm).unwrap())
                        / (2.0 * h);
                    let scale = fd.abs().max(1e-3 * qmle_objective(&x, family, &g).unwrap());
                    prop_assert!((grad[c] - fd).abs() <= 1e-5 * scale, "{family} c={c}: {} vs {fd}", grad[c]);
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    }));

    checks.push(property("Parseval", 32, |runner| {
        runner
            .run(&prop::collection::vec(-100.0f64..100.0, 4..600), |v| {
                let s = Series::new(v).unwrap();
                let p = periodogram_full(&s).unwrap();
                let n = s.len() as f64;
                let lhs = 2.0 * PI / n * p.values.iter().sum::<f64>();
                let m = s.mean();
                let var = s.values().iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
                prop_assert!((lhs - var).abs() <= 1e-10 * var.max(1e-300), "{lhs} vs {var}");
                Ok(())
            })
            .map_err(|e| e.to_string())
    }));

    let mut cfg = MCConfig::desk(Family::Farima10, vec![Cell::new(&[0.2, 0.5], 1.0), Cell::new(&[0.35, -0.3], 2.0)]);
    cfg.n_grid = vec![150];
    cfg.replications = 12;
    cfg.estimators = vec![Estimator::Qmle, Estimator::Whittle];
    cfg.base_seed = 11;
    let one = run_mc(&cfg, Some(1)).unwrap();
    let three = run_mc(&cfg, Some(3)).unwrap();
    let det = one == three;
    checks.push((det, format!("run_mc determinism across 1 and 3 workers {}", if det { "ok" } else { "FAILED" })));

    let pass = checks.iter().all(|c| c.0);
    outcome(pass, checks.into_iter().map(|c| c.1).collect::<Vec<_>>().join("; "))
}

fn main() {
    let (c3, c3_alpha9) = criterion_3();
    let table1 = campaign(Family::Farima00, vec![Cell::new(&[0.2], 4.0)], vec![1000], 300, 4);
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, c3),
        (4, criterion_4(&table1)),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8(&table1)),
        (9, criterion_9()),
        (10, criterion_10()),
        (11, criterion_11()),
    ];
    for (i, o) in &results {
        println!("criterion {i}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if *i == 3 {
            let tag = if c3_alpha9.pass { "PASS" } else { "FAIL" };
            println!("criterion 3 (extended): {tag} {}", c3_alpha9.detail);
        }
    }
    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.pass).map(|(i, _)| *i).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
