//! Simulation and estimation of long-memory causal linear processes.
//!
//! The crate covers three model families (fractional noise, FARIMA(1,d,0) and
//! a pure power-law AR(∞) process), exact Gaussian simulation, the Gaussian
//! quasi-maximum likelihood estimator built on truncated one-step predictors,
//! the Whittle estimator, best linear unbiased estimation of the mean, the
//! asymptotic covariance of the QMLE, and a Monte Carlo harness.

// `!(x > 0.0)` also rejects NaN; reference constants keep all printed digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod estimate;
pub mod fft;
pub mod models;
pub mod montecarlo;
pub mod optimize;
pub mod quadrature;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use estimate::{Estimator, FitResult};
pub use models::{Bounds, CoeffTable, Family, ModelSpec};
pub use simulate::{GenConfig, Generator, Series};
