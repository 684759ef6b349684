//! The analysis pipeline on a trending long-memory series, as with monthly
//! temperature anomalies.
//!
//! cargo run --release --example analyze -- [series.csv]

use longmem::cli::analyze;
use longmem::estimate::Estimator;
use longmem::simulate::{simulate, GenConfig};
use longmem::{Family, ModelSpec, Series};

fn main() -> longmem::error::Result<()> {
    let series = match std::env::args().nth(1) {
        Some(path) => Series::read_csv_path(path.as_ref())?,
        None => {
            let noise = simulate(&ModelSpec::farima00(0.4, 0.04)?, 1632, &GenConfig::exact(1854))?;
            Series::new(noise.values().iter().enumerate().map(|(t, v)| -0.3 + 4e-4 * t as f64 + v).collect())?
        }
    };
    let result = analyze(&series, &[Family::Farima00, Family::Lm], &[Estimator::Qmle, Estimator::Whittle], true)?;
    println!("pipeline: {}", result.pipeline);
    if let Some((a, b)) = result.trend {
        println!("trend: {a:.4} + {b:.6} t");
    }
    for fit in &result.fits {
        println!(
            "{:<9} {:<8} d={:.4} sigma2={:.5} stderr={:.4?}",
            fit.family.to_string(),
            fit.estimator.to_string(),
            fit.d_hat(),
            fit.sigma2_hat,
            fit.stderr.as_deref().unwrap_or(&[])
        );
    }
    println!("best fit: {}; BLUE {:.4}, sample mean {:.4}", result.best, result.mu_blue, result.sample_mean);
    Ok(())
}
