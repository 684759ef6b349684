//! BLUE of the mean against the sample mean.
//!
//! cargo run --example blue

use longmem::estimate::{blue_efficiency, blue_mean};
use longmem::montecarlo::run_mean_mc;
use longmem::simulate::{simulate, GenConfig};
use longmem::ModelSpec;

fn main() -> longmem::error::Result<()> {
    let spec = ModelSpec::farima00(0.35, 1.0)?;
    let series = simulate(&spec.clone().with_mu(10.0), 2000, &GenConfig::exact(5))?;
    println!("sample mean {:.4}, BLUE {:.4}", series.mean(), blue_mean(series.values(), &spec)?);

    for d in [0.1, 0.25, 0.4, 0.45] {
        println!("limiting efficiency of the sample mean at d={d}: {:.5}", blue_efficiency(d)?);
    }

    println!("n      sd(mean)  sd(BLUE)  scaled sd(mean)  scaled sd(BLUE)");
    for row in run_mean_mc(&spec.with_mu(10.0), &[300, 1000, 3000], 200, 1, None)? {
        println!(
            "{:<6} {:.5}   {:.5}   {:.4}           {:.4}",
            row.n, row.sd_sample_mean, row.sd_blue, row.scaled_sd_sample_mean, row.scaled_sd_blue
        );
    }
    Ok(())
}
