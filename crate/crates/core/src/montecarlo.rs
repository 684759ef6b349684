//! Monte Carlo replication engine.
//!
//! Each replication `(cell, n, r)` draws its path from the seed
//! `derive_seed(base_seed, [cell, n, r])`, so a campaign is reproducible
//! whatever the number of worker threads. Results are gathered in task order
//! and reduced with compensated summation.
//!
//! A fit counts as a failure when it errors, does not converge or returns a
//! non-finite estimate. Boundary-pinned fits are valid constrained estimates;
//! they are kept in the aggregates and counted in `pinned`.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{blue_weights, fit_qmle, fit_whittle, Estimator, FitResult};
use crate::models::{autocovariance, Bounds, Family, ModelSpec};
use crate::simulate::{derive_seed, Generator, Sampler, Series};

/// One parameter cell `(γ*, σ²*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub gamma: Vec<f64>,
    pub sigma2: f64,
}

impl Cell {
    pub fn new(gamma: &[f64], sigma2: f64) -> Self {
        Self { gamma: gamma.to_vec(), sigma2 }
    }

    pub fn label(&self, family: Family) -> String {
        let mut s = String::new();
        for (name, v) in family.gamma_names().iter().zip(&self.gamma) {
            let _ = write!(s, "{name}={v} ");
        }
        let _ = write!(s, "sigma2={}", self.sigma2);
        s
    }
}

fn default_replications() -> usize {
    300
}

fn default_n_grid() -> Vec<usize> {
    vec![300, 1000, 3000]
}

fn default_estimators() -> Vec<Estimator> {
    vec![Estimator::Qmle]
}

fn default_true() -> bool {
    true
}

/// A Monte Carlo campaign, usually read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub family: Family,
    pub theta_grid: Vec<Cell>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<Estimator>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub generator: Generator,
    #[serde(default)]
    pub bounds: Bounds,
    /// Export per-replication estimates.
    #[serde(default = "default_true")]
    pub keep_raw: bool,
}

impl MCConfig {
    /// Desk-scale defaults: R = 300 and n ∈ {300, 1000, 3000}.
    pub fn desk(family: Family, theta_grid: Vec<Cell>) -> Self {
        Self {
            family,
            theta_grid,
            n_grid: default_n_grid(),
            replications: default_replications(),
            estimators: default_estimators(),
            base_seed: 0,
            generator: Generator::ExactGaussian,
            bounds: Bounds::default(),
            keep_raw: true,
        }
    }

    /// Full scale: R = 1000 and n ∈ {300, 1000, 3000, 10000}.
    pub fn full_scale(mut self) -> Self {
        self.replications = 1000;
        self.n_grid = vec![300, 1000, 3000, 10_000];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be at least 1".into()));
        }
        if self.theta_grid.is_empty() || self.n_grid.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidInput("theta_grid, n_grid and estimators must be non-empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 4) {
            return Err(Error::InvalidInput(format!("sample size {n} too small")));
        }
        for c in &self.theta_grid {
            self.spec(c)?;
        }
        Ok(())
    }

    fn spec(&self, cell: &Cell) -> Result<ModelSpec> {
        ModelSpec::with_bounds(self.family, &cell.gamma, cell.sigma2, self.bounds)
    }
}

/// Summary of one coordinate of θ̂ over the successful replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordStats {
    pub name: String,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub sd: f64,
    pub sqrt_mse: f64,
    /// Delta-method standard error of `sqrt_mse`.
    pub sqrt_mse_se: f64,
}

/// Aggregates for one (cell, n, estimator).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub cell: usize,
    pub n: usize,
    pub estimator: Estimator,
    pub replications: usize,
    pub successes: usize,
    pub failures: usize,
    pub pinned: usize,
    pub coords: Vec<CoordStats>,
    /// `[γ̂…, σ̂²]` per successful replication, in replication order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub raw: Vec<Vec<f64>>,
}

impl ReportRow {
    pub fn coord(&self, name: &str) -> Option<&CoordStats> {
        self.coords.iter().find(|c| c.name == name)
    }

    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.replications as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub config: MCConfig,
    pub rows: Vec<ReportRow>,
}

impl MCReport {
    pub fn row(&self, cell: usize, n: usize, estimator: Estimator) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.cell == cell && r.n == n && r.estimator == estimator)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn summarize(name: &str, truth: f64, values: &[f64]) -> CoordStats {
    let r = values.len() as f64;
    if values.is_empty() {
        return CoordStats {
            name: name.into(),
            truth,
            mean: f64::NAN,
            bias: f64::NAN,
            sd: f64::NAN,
            sqrt_mse: f64::NAN,
            sqrt_mse_se: f64::NAN,
        };
    }
    let (mut s, mut se2, mut se4) = (KahanSum::default(), KahanSum::default(), KahanSum::default());
    for &v in values {
        let e = v - truth;
        s.add(v);
        se2.add(e * e);
        se4.add(e * e * e * e);
    }
    let mean = s.total() / r;
    let mse = se2.total() / r;
    let mut dev = KahanSum::default();
    for &v in values {
        dev.add((v - mean) * (v - mean));
    }
    let sd = if values.len() > 1 { (dev.total() / (r - 1.0)).sqrt() } else { 0.0 };
    let sqrt_mse = mse.sqrt();
    // Var(MSE estimate) = Var(e²)/R, then d sqrt(m) = dm / (2 sqrt m).
    let var_e2 = (se4.total() / r - mse * mse).max(0.0);
    let sqrt_mse_se = if sqrt_mse > 0.0 { (var_e2 / r).sqrt() / (2.0 * sqrt_mse) } else { 0.0 };
    CoordStats { name: name.into(), truth, mean, bias: mean - truth, sd, sqrt_mse, sqrt_mse_se }
}

fn fit_with(estimator: Estimator, series: &Series, family: Family, bounds: &Bounds) -> Result<FitResult> {
    match estimator {
        Estimator::Qmle => fit_qmle(series, family, bounds),
        Estimator::Whittle => fit_whittle(series, family, bounds),
    }
}

enum Outcome {
    Ok { theta: Vec<f64>, pinned: bool },
    Failed,
}

fn outcome(fit: Result<FitResult>) -> Outcome {
    match fit {
        Ok(f) if f.converged && f.sigma2_hat.is_finite() && f.gamma_hat.iter().all(|g| g.is_finite()) => {
            let mut theta = f.gamma_hat;
            theta.push(f.sigma2_hat);
            Outcome::Ok { theta, pinned: f.boundary_pinned }
        }
        Ok(f) => {
            log::debug!("replication did not converge: {f:?}");
            Outcome::Failed
        }
        Err(e) => {
            log::debug!("replication failed: {e}");
            Outcome::Failed
        }
    }
}

/// Builds a thread pool with `workers` threads (`None` = rayon default).
fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    b.build().map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))
}

/// Runs the campaign on `workers` threads.
pub fn run_mc(config: &MCConfig, workers: Option<usize>) -> Result<MCReport> {
    config.validate()?;
    let pool = pool(workers)?;
    let family = config.family;
    let mut names: Vec<String> = family.gamma_names().iter().map(|s| s.to_string()).collect();
    names.push("sigma2".into());
    let mut rows = Vec::new();

    for (ci, cell) in config.theta_grid.iter().enumerate() {
        let spec = config.spec(cell)?;
        for &n in &config.n_grid {
            let start = Instant::now();
            let sampler = Sampler::new(&spec, n, config.generator)?;
            let results: Vec<Vec<Outcome>> = pool.install(|| {
                (0..config.replications)
                    .into_par_iter()
                    .map(|r| {
                        let seed = derive_seed(config.base_seed, &[ci as u64, n as u64, r as u64]);
                        match Series::new(sampler.sample(seed)) {
                            Ok(series) => config
                                .estimators
                                .iter()
                                .map(|&e| outcome(fit_with(e, &series, family, &config.bounds)))
                                .collect(),
                            Err(_) => config.estimators.iter().map(|_| Outcome::Failed).collect(),
                        }
                    })
                    .collect()
            });
            for (ei, &estimator) in config.estimators.iter().enumerate() {
                let mut thetas = Vec::with_capacity(config.replications);
                let (mut failures, mut pinned) = (0, 0);
                for rep in &results {
                    match &rep[ei] {
                        Outcome::Ok { theta, pinned: p } => {
                            thetas.push(theta.clone());
                            pinned += usize::from(*p);
                        }
                        Outcome::Failed => failures += 1,
                    }
                }
                let mut truth = cell.gamma.clone();
                truth.push(cell.sigma2);
                let coords = names
                    .iter()
                    .enumerate()
                    .map(|(c, name)| {
                        let col: Vec<f64> = thetas.iter().map(|t| t[c]).collect();
                        summarize(name, truth[c], &col)
                    })
                    .collect();
                rows.push(ReportRow {
                    cell: ci,
                    n,
                    estimator,
                    replications: config.replications,
                    successes: thetas.len(),
                    failures,
                    pinned,
                    coords,
                    raw: if config.keep_raw { thetas } else { Vec::new() },
                });
            }
            log::info!(
                "{} {} n={n}: {} replications in {:.1}s",
                family,
                cell.label(family),
                config.replications,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(MCReport { config: config.clone(), rows })
}

/// Text formats for [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            _ => Err(Error::InvalidInput(format!("unknown table format `{s}`"))),
        }
    }
}

/// sqrt-MSE table: one row per (n, estimator), one column per (cell, coordinate).
pub fn emit_table(report: &MCReport, format: TableFormat) -> Result<String> {
    let cfg = &report.config;
    let family = cfg.family;
    let mut names: Vec<&str> = family.gamma_names().to_vec();
    names.push("sigma2");
    let headers: Vec<String> = cfg
        .theta_grid
        .iter()
        .flat_map(|c| names.iter().map(move |nm| format!("{} [{nm}]", c.label(family))))
        .collect();
    let mut body: Vec<(usize, Estimator, Vec<f64>)> = Vec::new();
    for &n in &cfg.n_grid {
        for &e in &cfg.estimators {
            if !report.rows.iter().any(|r| r.n == n && r.estimator == e) {
                continue;
            }
            let vals = (0..cfg.theta_grid.len())
                .flat_map(|ci| {
                    let row = report.row(ci, n, e);
                    names.iter().map(move |nm| row.and_then(|r| r.coord(nm)).map_or(f64::NAN, |c| c.sqrt_mse))
                })
                .collect();
            body.push((n, e, vals));
        }
    }
    if body.is_empty() {
        return Err(Error::InvalidInput("report has no rows".into()));
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut head = vec!["n".to_string(), "estimator".to_string()];
            head.extend(headers);
            w.write_record(&head)?;
            for (n, e, vals) in &body {
                let mut rec = vec![n.to_string(), e.to_string()];
                rec.extend(vals.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
        }
        TableFormat::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "| n (estimator) | {} |", headers.join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(headers.len() + 1));
            for (n, e, vals) in &body {
                let cells: Vec<String> = vals.iter().map(|v| format!("{v:.3}")).collect();
                let _ = writeln!(s, "| {n} ({e}) | {} |", cells.join(" | "));
            }
            Ok(s)
        }
    }
}

/// Spread of the sample mean and the BLUE of the location across sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub n: usize,
    pub replications: usize,
    pub sd_sample_mean: f64,
    pub sd_blue: f64,
    /// `sd · n^{1/2-d}`
    pub scaled_sd_sample_mean: f64,
    pub scaled_sd_blue: f64,
}

fn sd_about(values: &[f64], center: f64) -> f64 {
    let mut s = KahanSum::default();
    for v in values {
        s.add((v - center) * (v - center));
    }
    (s.total() / values.len() as f64).sqrt()
}

/// Monte Carlo of `X̄_n` and `μ̂_BLUE` under `spec` (location `spec.mu`).
pub fn run_mean_mc(
    spec: &ModelSpec,
    n_grid: &[usize],
    replications: usize,
    base_seed: u64,
    workers: Option<usize>,
) -> Result<Vec<MeanRow>> {
    spec.validate()?;
    if replications < 2 {
        return Err(Error::InvalidInput("need at least 2 replications".into()));
    }
    let pool = pool(workers)?;
    let mut out = Vec::new();
    for (ni, &n) in n_grid.iter().enumerate() {
        let sampler = Sampler::new(spec, n, Generator::ExactGaussian)?;
        let w = blue_weights(&autocovariance(spec, n - 1)?, n)?;
        let pairs: Vec<(f64, f64)> = pool.install(|| {
            (0..replications)
                .into_par_iter()
                .map(|r| {
                    let x = sampler.sample(derive_seed(base_seed, &[ni as u64, n as u64, r as u64]));
                    let mean = x.iter().sum::<f64>() / n as f64;
                    let blue: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                    (mean, blue)
                })
                .collect()
        });
        let means: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let blues: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let scale = (n as f64).powf(0.5 - spec.d);
        let sd_sample_mean = sd_about(&means, spec.mu);
        let sd_blue = sd_about(&blues, spec.mu);
        out.push(MeanRow {
            n,
            replications,
            sd_sample_mean,
            sd_blue,
            scaled_sd_sample_mean: sd_sample_mean * scale,
            scaled_sd_blue: sd_blue * scale,
        });
    }
    Ok(out)
}
