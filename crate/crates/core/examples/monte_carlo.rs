//! A small Monte Carlo campaign with a markdown table of sqrt-MSE.
//!
//! cargo run --release --example monte_carlo

use longmem::estimate::Estimator;
use longmem::montecarlo::{emit_table, run_mc, Cell, MCConfig, TableFormat};
use longmem::Family;

fn main() -> longmem::error::Result<()> {
    let mut cfg = MCConfig::desk(Family::Farima00, vec![Cell::new(&[0.1], 4.0), Cell::new(&[0.4], 4.0)]);
    cfg.n_grid = vec![300, 1000];
    cfg.replications = 100;
    cfg.estimators = vec![Estimator::Qmle, Estimator::Whittle];
    cfg.keep_raw = false;
    cfg.base_seed = 2024;
    let report = run_mc(&cfg, None)?;
    print!("{}", emit_table(&report, TableFormat::Markdown)?);
    for row in &report.rows {
        let d = row.coord("d").expect("d is always reported");
        println!(
            "cell {} n={} {}: bias {:+.4}, sqrt-MSE {:.4} ± {:.4}, failures {}",
            row.cell, row.n, row.estimator, d.bias, d.sqrt_mse, d.sqrt_mse_se, row.failures
        );
    }
    Ok(())
}
