//! AR(∞) and MA(∞) weights, autocovariances and special functions.
//!
//! cargo run --example coefficients

use longmem::models::{ar_coeffs, autocovariance, ma_coeffs, CoeffTable};
use longmem::specfun::{log_gamma, riemann_zeta};
use longmem::ModelSpec;

fn main() -> longmem::error::Result<()> {
    let specs = [ModelSpec::farima00(0.3, 1.0)?, ModelSpec::farima10(0.3, 0.5, 1.0)?, ModelSpec::lm(0.3, 1.0)?];
    for spec in &specs {
        let a = ma_coeffs(spec, 5)?;
        let u = ar_coeffs(spec, 5)?;
        let r = autocovariance(spec, 5)?;
        let defect = CoeffTable::new(spec, 500)?.convolution_defect();
        println!("{} gamma={:?}", spec.family, spec.gamma());
        println!("  a_0..5 = {a:.5?}");
        println!("  u_1..5 = {:.5?}", &u[1..]);
        println!("  r(0..5) = {r:.5?}");
        println!("  convolution defect up to k=500: {defect:.1e}");
    }
    println!("log Gamma(0.5) = {:.15}", log_gamma(0.5)?);
    println!("zeta(1.3) = {:.15}", riemann_zeta(1.3, 0)?);
    Ok(())
}
