//! Best linear unbiased estimation of the mean.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::{autocovariance, ModelSpec};
use crate::specfun::beta_fn;

use super::qmle::dot;

/// Solves `T x = b` for the symmetric Toeplitz `T` with first column `r`
/// (Levinson recursion, O(n²)).
pub fn levinson_solve(r: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if r.len() < n {
        return Err(Error::InvalidInput(format!("need {n} autocovariances, got {}", r.len())));
    }
    let r0 = r[0];
    if !(r0 > 0.0) {
        return Err(Error::ToeplitzBreakdown { order: 0, variance: r0 });
    }
    // normalised problem with unit diagonal
    let t: Vec<f64> = r[..n].iter().map(|v| v / r0).collect();
    let bn: Vec<f64> = b.iter().map(|v| v / r0).collect();
    let mut x = vec![bn[0]];
    if n == 1 {
        return Ok(x);
    }
    let mut y = vec![-t[1]];
    let mut alpha = -t[1];
    let mut beta = 1.0;
    // reversed copies keep the inner products contiguous
    let mut x_rev = x.clone();
    let mut y_rev = y.clone();
    for k in 1..n {
        beta *= 1.0 - alpha * alpha;
        if !(beta > 0.0) {
            return Err(Error::ToeplitzBreakdown { order: k, variance: beta * r0 });
        }
        // t_1..t_k against x_{k-1}..x_0
        let mu = (bn[k] - dot(&t[1..=k], &x_rev)) / beta;
        for i in 0..k {
            x[i] += mu * y[k - 1 - i];
        }
        x.push(mu);
        x_rev.clear();
        x_rev.extend(x.iter().rev());
        if k < n - 1 {
            alpha = -(t[k + 1] + dot(&t[1..=k], &y_rev)) / beta;
            let prev = y.clone();
            for i in 0..k {
                y[i] += alpha * prev[k - 1 - i];
            }
            y.push(alpha);
            y_rev.clear();
            y_rev.extend(y.iter().rev());
        }
    }
    Ok(x)
}

/// BLUE weights `Σ^{-1}1 / (1ᵀΣ^{-1}1)` for autocovariances `acv` (length ≥ n).
pub fn blue_weights(acv: &[f64], n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("BLUE needs n >= 2, got {n}")));
    }
    let w = levinson_solve(acv, &vec![1.0; n])?;
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ToeplitzBreakdown { order: n, variance: total });
    }
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// BLUE of the location of `values` under the covariance structure of `spec`.
pub fn blue_mean(values: &[f64], spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("BLUE needs n >= 2, got {n}")));
    }
    let acv = autocovariance(spec, n - 1)?;
    let w = blue_weights(&acv, n)?;
    Ok(dot(&w, values))
}

/// Limit of `Var(X̄_n) / Var(μ̂_BLUE)`: `π d (2d+1) / (B(1-d,1-d) sin(πd))`.
pub fn blue_efficiency(d: f64) -> Result<f64> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::Domain(format!("blue_efficiency needs d in (0, 1/2), got {d}")));
    }
    Ok(PI * d * (2.0 * d + 1.0) / (beta_fn(1.0 - d, 1.0 - d)? * (PI * d).sin()))
}

/// Normalisation `n^{1/2 - d}` of the mean estimators.
pub fn mean_clt_scale(n: usize, d: f64) -> Result<f64> {
    if n == 0 || !(0.0..0.5).contains(&d) {
        return Err(Error::Domain(format!("mean_clt_scale needs n >= 1 and d in [0, 1/2), got n={n}, d={d}")));
    }
    Ok((n as f64).powf(0.5 - d))
}
