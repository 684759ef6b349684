//! Asymptotic covariance of the QMLE against the Whittle information.
//!
//! cargo run --example asymptotic

use longmem::estimate::{asymptotic_covariance, whittle_information};
use longmem::ModelSpec;

fn main() -> longmem::error::Result<()> {
    for spec in [ModelSpec::farima00(0.2, 4.0)?, ModelSpec::farima10(0.2, 0.5, 1.0)?, ModelSpec::lm(0.3, 1.0)?] {
        let info = asymptotic_covariance(&spec, 3.0)?;
        let w = whittle_information(&spec)?;
        println!("{} gamma={:?}", spec.family, spec.gamma());
        println!("  M*      = {:.6?}", info.m);
        println!("  Whittle = {:.6?}", w);
        println!("  inverse = {:.6?}", info.m_inv);
        println!("  stderr at n=1000: {:.4?}", info.stderr(1000));
    }
    println!("{}", serde_json::to_string_pretty(&asymptotic_covariance(&ModelSpec::farima00(0.3, 1.0)?, 3.0)?)?);
    Ok(())
}
