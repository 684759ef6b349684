//! Parameter estimation: QMLE, Whittle, BLUE of the mean and the asymptotic
//! covariance of the QMLE.
//!
//! Both γ estimators profile σ² out and minimise over the parameter box shrunk
//! by [`BOUND_MARGIN`]. One-dimensional problems use a grid scan followed by
//! Brent's method; FARIMA(1,d,0) uses Nelder–Mead restarted from the best
//! points of a fixed start grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Bounds, Family, Interval, ModelSpec};
use crate::optimize::{nelder_mead, scan_then_brent, Minimum};

pub mod asymptotic;
pub mod blue;
pub mod qmle;
pub mod whittle;

pub use asymptotic::{
    asymptotic_covariance, asymptotic_covariance_with, whittle_information, AsymptoticInfo, DEFAULT_INFO_TRUNCATION,
};
pub use blue::{blue_efficiency, blue_mean, blue_weights, levinson_solve, mean_clt_scale};
pub use qmle::{fit_qmle, qmle_gradient, qmle_objective, quasi_loglik, truncated_predictor, truncated_predictors};
pub use whittle::{fit_whittle, periodogram, periodogram_full, spectral_density, Periodogram};

/// Optimiser iterates stay this far inside the parameter box.
pub const BOUND_MARGIN: f64 = 1e-3;
/// Below this length fits still run but carry the `small_sample` flag.
pub const SMALL_SAMPLE: usize = 30;

const SCAN_POINTS: usize = 12;
const BRENT_XTOL: f64 = 1e-7;
const NM_XTOL: f64 = 1e-7;
const NM_FTOL: f64 = 1e-12;
const NM_RESTARTS: usize = 5;
const NM_MAX_ITER: usize = 2000;
const START_D: [f64; 3] = [0.1, 0.25, 0.4];
const START_ALPHA: [f64; 4] = [-0.5, 0.0, 0.5, 0.9];
const PIN_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Qmle,
    Whittle,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Qmle => "qmle",
            Estimator::Whittle => "whittle",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qmle" | "qml" => Ok(Estimator::Qmle),
            "whittle" => Ok(Estimator::Whittle),
            _ => Err(Error::InvalidInput(format!("unknown estimator `{s}`"))),
        }
    }
}

/// Result of fitting one family to one series.
///
/// `stderr`, when present, lists the standard error of each γ coordinate
/// followed by that of σ̂².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimator: Estimator,
    pub family: Family,
    pub gamma_hat: Vec<f64>,
    pub sigma2_hat: f64,
    pub stderr: Option<Vec<f64>>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Some γ coordinate sits on the (shrunk) parameter box.
    #[serde(default)]
    pub boundary_pinned: bool,
    #[serde(default)]
    pub small_sample: bool,
    #[serde(default)]
    pub n: usize,
}

impl FitResult {
    pub fn d_hat(&self) -> f64 {
        self.gamma_hat[0]
    }

    /// The fitted model, with zero location and the given bounds.
    pub fn spec(&self, bounds: Bounds) -> Result<ModelSpec> {
        ModelSpec::with_bounds(self.family, &self.gamma_hat, self.sigma2_hat, bounds)
    }

    /// Fills `stderr` from the asymptotic covariance at the estimate.
    pub fn attach_stderr(&mut self, bounds: Bounds, mu4: f64) -> Result<()> {
        let info = asymptotic_covariance(&self.spec(bounds)?, mu4)?;
        self.stderr = Some(info.stderr(self.n));
        Ok(())
    }
}

pub(crate) fn check_series_len(n: usize) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 observations, got {n}")));
    }
    let small = n < SMALL_SAMPLE;
    if small {
        log::warn!("fitting a series of length {n} (< {SMALL_SAMPLE}); asymptotics are unreliable");
    }
    Ok(small)
}

/// The optimisation box: `bounds` shrunk by [`BOUND_MARGIN`].
pub fn search_box(family: Family, bounds: &Bounds) -> Vec<Interval> {
    bounds
        .gamma(family)
        .into_iter()
        .map(|(lo, hi)| {
            let (a, b) = (lo + BOUND_MARGIN, hi - BOUND_MARGIN);
            if a <= b {
                (a, b)
            } else {
                let m = 0.5 * (lo + hi);
                (m, m)
            }
        })
        .collect()
}

pub(crate) struct Argmin {
    pub gamma: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub pinned: bool,
}

/// Minimises a profiled contrast over the shrunk box.
pub(crate) fn minimize_contrast<F>(family: Family, bounds: &Bounds, contrast: F) -> Result<Argmin>
where
    F: Fn(&[f64]) -> f64,
{
    let boxed = search_box(family, bounds);
    let f = |g: &[f64]| {
        let v = contrast(g);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let best: Minimum = if boxed.len() == 1 {
        let (lo, hi) = boxed[0];
        scan_then_brent(|x| f(&[x]), lo, hi, SCAN_POINTS, BRENT_XTOL)
    } else {
        let mut starts: Vec<(Vec<f64>, f64)> = START_D
            .iter()
            .flat_map(|&d| START_ALPHA.iter().map(move |&a| vec![d, a]))
            .map(|mut s| {
                for (x, &(lo, hi)) in s.iter_mut().zip(&boxed) {
                    *x = x.clamp(lo, hi);
                }
                let v = f(&s);
                (s, v)
            })
            .collect();
        let screened = starts.len();
        starts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let steps = [0.05, 0.1];
        let mut best: Option<Minimum> = None;
        let mut evals = screened;
        for (s, _) in starts.iter().take(NM_RESTARTS) {
            let m = nelder_mead(f, s, &steps, &boxed, NM_XTOL, NM_FTOL, NM_MAX_ITER);
            evals += m.evaluations;
            if best.as_ref().is_none_or(|b| m.f < b.f) {
                best = Some(m);
            }
        }
        let mut b = best.expect("at least one restart");
        b.evaluations = evals;
        b
    };
    if !best.f.is_finite() {
        return Err(Error::FitFailed("contrast is not finite anywhere on the search grid".into()));
    }
    let pinned = best.x.iter().zip(&boxed).any(|(x, (lo, hi))| (x - lo).abs() < PIN_TOL || (hi - x).abs() < PIN_TOL);
    Ok(Argmin { gamma: best.x, value: best.f, evaluations: best.evaluations, converged: best.converged, pinned })
}
