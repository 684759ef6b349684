//! Command-line front end: `simulate`, `fit`, `mc`, `blue` and `analyze`.
//!
//! Exit codes: 0 on success, 1 on I/O or validation errors, 2 when a fit
//! fails or does not converge.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{
    blue_efficiency, blue_mean, fit_qmle, fit_whittle, truncated_predictors, Estimator, FitResult,
};
use crate::models::{ar_coeffs_gamma, Bounds, Family, ModelSpec};
use crate::montecarlo::{emit_table, run_mc, MCConfig, TableFormat};
use crate::simulate::{simulate, GenConfig, Series};

#[derive(Debug, Parser)]
#[command(name = "longmem", version, about = "Simulate and estimate long-memory linear processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit one family to a CSV series and print the FitResult as JSON.
    Fit(FitArgs),
    /// Run a Monte Carlo campaign described by a JSON config.
    Mc(McArgs),
    /// BLUE of the mean of a CSV series.
    Blue(BlueArgs),
    /// Detrend, fit several families and report everything as JSON.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Exact,
    TruncatedMa,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value = "FARIMA00")]
    pub family: String,
    #[arg(long)]
    pub d: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        let family: Family = self.family.parse()?;
        let gamma = match family {
            Family::Farima10 => vec![self.d, self.alpha],
            _ => {
                if self.alpha != 0.0 {
                    return Err(Error::InvalidInput(format!("--alpha is only valid for FARIMA10, not {family}")));
                }
                vec![self.d]
            }
        };
        Ok(ModelSpec::new(family, &gamma, self.sigma2)?.with_mu(self.mu))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GeneratorKind::Exact)]
    pub generator: GeneratorKind,
    /// MA truncation for the truncated-ma generator (default: 10 n).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub burnin: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV file, or `-` for standard input.
    pub input: PathBuf,
    #[arg(long, default_value = "FARIMA00")]
    pub family: String,
    #[arg(long, default_value = "qmle")]
    pub estimator: String,
    /// Remove an OLS linear trend before fitting.
    #[arg(long)]
    pub detrend: bool,
    /// Attach asymptotic standard errors (μ₄ estimated from residuals).
    #[arg(long)]
    pub stderr: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override the config with R = 1000 and n up to 10000.
    #[arg(long)]
    pub full_scale: bool,
    /// Where to write the MCReport JSON (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableArg::Markdown)]
    pub table: TableArg,
    /// Where to write the table (default: standard error when --out is unset,
    /// else standard output).
    #[arg(long)]
    pub table_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Csv,
    Markdown,
}

#[derive(Debug, Args)]
pub struct BlueArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "FARIMA00")]
    pub family: String,
    /// Memory parameter of the covariance model; fitted by QMLE when omitted.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Families to fit (repeatable).
    #[arg(long = "family", default_values_t = vec!["FARIMA00".to_string(), "LM".to_string()])]
    pub families: Vec<String>,
    /// Estimators to run (repeatable).
    #[arg(long = "estimator", default_values_t = vec!["qmle".to_string()])]
    pub estimators: Vec<String>,
    #[arg(long)]
    pub detrend: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output of `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub n: usize,
    /// `(intercept, slope)` of the OLS detrend, time indexed from 1.
    pub trend: Option<(f64, f64)>,
    pub fits: Vec<FitResult>,
    /// Index into `fits` of the QMLE fit with the smallest σ̂².
    pub best: usize,
    /// BLUE of the mean of the original series under the best fit.
    pub mu_blue: f64,
    pub sample_mean: f64,
    /// Fourth moment of the standardised one-step residuals of the best fit.
    pub residual_mu4: f64,
    pub pipeline: String,
}

/// Output of `blue`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlueResult {
    pub n: usize,
    pub family: Family,
    pub gamma: Vec<f64>,
    pub sigma2: f64,
    pub mu_blue: f64,
    pub sample_mean: f64,
    /// Limiting efficiency of the sample mean relative to the BLUE.
    pub efficiency_limit: f64,
    /// Present when γ was estimated from the data.
    pub fit: Option<FitResult>,
}

/// OLS fit of `X_t = a + b t` (t = 1..n); returns residuals, `a`, `b`.
pub fn detrend_linear(series: &Series) -> Result<(Series, f64, f64)> {
    let x = series.values();
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("detrending needs n >= 3, got {n}")));
    }
    let tbar = (n as f64 + 1.0) / 2.0;
    let xbar = series.mean();
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let dt = (i + 1) as f64 - tbar;
        sxy += dt * (v - xbar);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    let intercept = xbar - slope * tbar;
    let resid: Vec<f64> = x.iter().enumerate().map(|(i, &v)| (v - xbar) - slope * ((i + 1) as f64 - tbar)).collect();
    // remove the O(ε) residual mean left by rounding
    let m = resid.iter().sum::<f64>() / n as f64;
    let resid = resid.into_iter().map(|r| r - m).collect();
    Ok((Series::new(resid)?, intercept, slope))
}

/// `E e⁴ / (E e²)²` of the one-step residuals of `fit` on `series`.
pub fn residual_mu4(series: &Series, fit: &FitResult) -> Result<f64> {
    let x = series.values();
    let u = ar_coeffs_gamma(fit.family, &fit.gamma_hat, x.len())?;
    let m = truncated_predictors(x, &u);
    let e: Vec<f64> = x.iter().zip(&m).map(|(a, b)| a - b).collect();
    let n = e.len() as f64;
    let m2 = e.iter().map(|v| v * v).sum::<f64>() / n;
    let m4 = e.iter().map(|v| v.powi(4)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return Err(Error::FitFailed("residuals vanish".into()));
    }
    Ok(m4 / (m2 * m2))
}

fn read_series(path: &Path) -> Result<Series> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        Series::read_csv(buf.as_bytes())
    } else {
        Series::read_csv(BufReader::new(File::open(path)?))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn fit_one(series: &Series, family: Family, estimator: Estimator) -> Result<FitResult> {
    let bounds = Bounds::default();
    match estimator {
        Estimator::Qmle => fit_qmle(series, family, &bounds),
        Estimator::Whittle => fit_whittle(series, family, &bounds),
    }
}

fn require_converged(fit: &FitResult) -> Result<()> {
    if fit.converged {
        Ok(())
    } else {
        Err(Error::FitFailed(format!("{} {} did not converge", fit.estimator, fit.family)))
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let spec = args.model.spec()?;
    if args.n < 2 {
        return Err(Error::InvalidInput("--n must be at least 2".into()));
    }
    let cfg = match args.generator {
        GeneratorKind::Exact => GenConfig::exact(args.seed),
        GeneratorKind::TruncatedMa => GenConfig::truncated_ma(args.k.unwrap_or(10 * args.n), args.burnin, args.seed),
    };
    let series = simulate(&spec, args.n, &cfg)?;
    let mut w = output(args.out.as_deref())?;
    series.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let family: Family = args.family.parse()?;
    let estimator: Estimator = args.estimator.parse()?;
    let mut series = read_series(&args.input)?;
    if args.detrend {
        series = detrend_linear(&series)?.0;
    }
    let mut fit = fit_one(&series, family, estimator)?;
    if args.stderr {
        let mu4 = residual_mu4(&series, &fit)?;
        fit.attach_stderr(Bounds::default(), mu4)?;
    }
    write_json(&fit, args.out.as_deref())?;
    require_converged(&fit)
}

pub fn cmd_mc(args: &McArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg: MCConfig = serde_json::from_str(&text)?;
    if args.full_scale {
        cfg = cfg.full_scale();
    }
    let report = run_mc(&cfg, args.workers)?;
    let format = match args.table {
        TableArg::Csv => TableFormat::Csv,
        TableArg::Markdown => TableFormat::Markdown,
    };
    let table = emit_table(&report, format)?;
    write_json(&report, args.out.as_deref())?;
    match (&args.table_out, &args.out) {
        (Some(p), _) => std::fs::write(p, table)?,
        (None, Some(_)) => print!("{table}"),
        (None, None) => eprint!("{table}"),
    }
    Ok(())
}

pub fn cmd_blue(args: &BlueArgs) -> Result<()> {
    let family: Family = args.family.parse()?;
    let series = read_series(&args.input)?;
    let (gamma, fit) = match args.d {
        Some(d) => {
            let g = if family == Family::Farima10 { vec![d, args.alpha.unwrap_or(0.0)] } else { vec![d] };
            (g, None)
        }
        None => {
            let fit = fit_qmle(&series, family, &Bounds::default())?;
            require_converged(&fit)?;
            (fit.gamma_hat.clone(), Some(fit))
        }
    };
    let sigma2 = fit.as_ref().map_or(1.0, |f| f.sigma2_hat);
    let spec = ModelSpec::new(family, &gamma, sigma2)?;
    let mu_blue = blue_mean(series.values(), &spec)?;
    let result = BlueResult {
        n: series.len(),
        family,
        gamma: gamma.clone(),
        sigma2,
        mu_blue,
        sample_mean: series.mean(),
        efficiency_limit: blue_efficiency(gamma[0])?,
        fit,
    };
    write_json(&result, args.out.as_deref())
}

/// The `analyze` pipeline on an in-memory series.
pub fn analyze(series: &Series, families: &[Family], estimators: &[Estimator], detrend: bool) -> Result<AnalysisResult> {
    if families.is_empty() || estimators.is_empty() {
        return Err(Error::InvalidInput("need at least one family and one estimator".into()));
    }
    let (work, trend) = if detrend {
        let (r, a, b) = detrend_linear(series)?;
        (r, Some((a, b)))
    } else {
        // the truncated predictor is not location invariant, so fit the
        // centred series
        let m = series.mean();
        (series.map(|v| v - m)?, None)
    };
    let mut fits = Vec::new();
    for &family in families {
        for &estimator in estimators {
            let fit = fit_one(&work, family, estimator)?;
            require_converged(&fit)?;
            fits.push(fit);
        }
    }
    let best = fits
        .iter()
        .enumerate()
        .filter(|(_, f)| f.estimator == Estimator::Qmle)
        .min_by(|a, b| a.1.sigma2_hat.total_cmp(&b.1.sigma2_hat))
        .map_or(0, |(i, _)| i);
    let mu4 = residual_mu4(&work, &fits[best])?;
    for fit in &mut fits {
        if let Err(e) = fit.attach_stderr(Bounds::default(), mu4) {
            log::warn!("no standard errors for {} {}: {e}", fit.estimator, fit.family);
        }
    }
    let spec = fits[best].spec(Bounds::default())?;
    let mu_blue = blue_mean(series.values(), &spec)?;
    let pipeline = format!(
        "{}fit {} by {}; stderr from M* with residual mu4; BLUE on the original series under the QMLE fit with smallest sigma2",
        if detrend { "OLS linear detrend on t=1..n; " } else { "subtract sample mean; " },
        families.iter().map(|f| f.name()).collect::<Vec<_>>().join(","),
        estimators.iter().map(|e| e.name()).collect::<Vec<_>>().join(","),
    );
    Ok(AnalysisResult {
        n: series.len(),
        trend,
        fits,
        best,
        mu_blue,
        sample_mean: series.mean(),
        residual_mu4: mu4,
        pipeline,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let families = args.families.iter().map(|s| s.parse()).collect::<Result<Vec<Family>>>()?;
    let estimators = args.estimators.iter().map(|s| s.parse()).collect::<Result<Vec<Estimator>>>()?;
    let series = read_series(&args.input)?;
    let result = analyze(&series, &families, &estimators, args.detrend)?;
    write_json(&result, args.out.as_deref())
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::FitFailed(_) => 2,
        _ => 1,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let res = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Blue(a) => cmd_blue(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("longmem: {e}");
            exit_code(&e)
        }
    }
}
