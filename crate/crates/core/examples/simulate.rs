//! Simulate long-memory paths with both generators and write one as CSV.
//!
//! cargo run --example simulate -- [out.csv]

use longmem::models::autocovariance;
use longmem::simulate::{simulate, GenConfig};
use longmem::ModelSpec;

fn sample_acv(x: &[f64], k: usize) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (0..x.len() - k).map(|t| (x[t] - m) * (x[t + k] - m)).sum::<f64>() / x.len() as f64
}

fn main() -> longmem::error::Result<()> {
    let spec = ModelSpec::farima10(0.3, 0.4, 2.0)?.with_mu(1.0);
    let n = 5000;
    let exact = simulate(&spec, n, &GenConfig::exact(7))?;
    let trunc = simulate(&spec, n, &GenConfig::truncated_ma(10 * n, 10 * n, 7))?;
    let r = autocovariance(&spec, 10)?;
    println!("lag  model     exact     truncated-ma");
    for k in [0, 1, 2, 5, 10] {
        println!("{k:>3}  {:8.4}  {:8.4}  {:8.4}", r[k], sample_acv(exact.values(), k), sample_acv(trunc.values(), k));
    }
    println!("sample means: {:.4} {:.4}", exact.mean(), trunc.mean());
    if let Some(path) = std::env::args().nth(1) {
        exact.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
