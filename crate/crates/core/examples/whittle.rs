//! Periodogram, spectral densities and the Whittle estimator next to the QMLE.
//!
//! cargo run --example whittle

use longmem::estimate::{fit_qmle, fit_whittle, periodogram, spectral_density};
use longmem::simulate::{simulate, GenConfig};
use longmem::{Bounds, Family, ModelSpec};

fn main() -> longmem::error::Result<()> {
    let spec = ModelSpec::lm(0.35, 1.0)?;
    let series = simulate(&spec, 3000, &GenConfig::exact(11))?;
    let pg = periodogram(&series)?;
    println!("lambda    I(lambda)  f(lambda)");
    for j in [0, 1, 4, 40, 400, pg.freqs.len() - 1] {
        println!("{:.4}  {:9.4}  {:9.4}", pg.freqs[j], pg.values[j], spectral_density(&spec, pg.freqs[j])?);
    }
    let bounds = Bounds::default();
    for family in [Family::Farima00, Family::Lm] {
        let w = fit_whittle(&series, family, &bounds)?;
        let q = fit_qmle(&series, family, &bounds)?;
        println!("{family:<9} whittle d={:.4} sigma2={:.4} | qmle d={:.4} sigma2={:.4}", w.d_hat(), w.sigma2_hat, q.d_hat(), q.sigma2_hat);
    }
    Ok(())
}
