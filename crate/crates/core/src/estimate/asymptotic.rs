//! Asymptotic covariance of the QMLE and the Whittle information matrix.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::toeplitz_matvec;
use crate::models::{autocovariance, dar_coeffs_gamma, Family, ModelSpec};
use crate::quadrature::tanh_sinh;

use super::whittle::spectral_shape;

pub const DEFAULT_INFO_TRUNCATION: usize = 20_000;
const MIN_TRUNCATION: usize = 1_000;

/// Truncated `M* = σ^{-2} Σ_{k,ℓ≤K} ∂_γ u_k ∂_γ u_ℓᵀ r_X(ℓ-k)` and the σ² variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticInfo {
    pub family: Family,
    pub gamma: Vec<f64>,
    pub sigma2: f64,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    pub m_inv: Vec<Vec<f64>>,
    /// `σ⁴(μ₄ - 1)`
    pub var_sigma2: f64,
    #[serde(rename = "K_used")]
    pub k_used: usize,
    pub mu4: f64,
}

impl AsymptoticInfo {
    /// Asymptotic standard errors at sample size `n`: γ coordinates, then σ².
    pub fn stderr(&self, n: usize) -> Vec<f64> {
        let n = n.max(1) as f64;
        let mut se: Vec<f64> = (0..self.m_inv.len()).map(|i| (self.m_inv[i][i] / n).sqrt()).collect();
        se.push((self.var_sigma2 / n).sqrt());
        se
    }
}

/// Cholesky factor of a small symmetric matrix, `None` unless positive definite.
fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let p = a.len();
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn spd_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let l = cholesky(a)?;
    let p = a.len();
    let mut inv = vec![vec![0.0; p]; p];
    for c in 0..p {
        // L y = e_c, then Lᵀ x = y
        let mut y = vec![0.0; p];
        for i in 0..p {
            let rhs = if i == c { 1.0 } else { 0.0 };
            y[i] = (rhs - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
        }
        for i in (0..p).rev() {
            let v = (y[i] - (i + 1..p).map(|k| l[k][i] * inv[k][c]).sum::<f64>()) / l[i][i];
            inv[i][c] = v;
        }
    }
    Some(inv)
}

/// [`asymptotic_covariance_with`] at the default truncation.
pub fn asymptotic_covariance(spec: &ModelSpec, mu4: f64) -> Result<AsymptoticInfo> {
    asymptotic_covariance_with(spec, mu4, DEFAULT_INFO_TRUNCATION)
}

/// Truncated M* with `K = k`; the quadratic forms use FFT Toeplitz products.
pub fn asymptotic_covariance_with(spec: &ModelSpec, mu4: f64, k: usize) -> Result<AsymptoticInfo> {
    spec.validate()?;
    if k < MIN_TRUNCATION {
        return Err(Error::InvalidInput(format!("truncation K must be at least {MIN_TRUNCATION}, got {k}")));
    }
    if !(mu4 >= 1.0) {
        return Err(Error::InvalidInput(format!("fourth moment must be >= 1, got {mu4}")));
    }
    let gamma = spec.gamma();
    let grads = dar_coeffs_gamma(spec.family, &gamma, k)?;
    let r = autocovariance(spec, k - 1)?;
    let p = grads.len();
    let products: Vec<Vec<f64>> = grads.iter().map(|g| toeplitz_matvec(&r, &g[1..])).collect();
    let mut m = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..=a {
            let v: f64 = grads[a][1..].iter().zip(&products[b]).map(|(x, y)| x * y).sum::<f64>() / spec.sigma2;
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    let m_inv = spd_inverse(&m).ok_or(Error::NotPositiveDefinite)?;
    Ok(AsymptoticInfo {
        family: spec.family,
        gamma,
        sigma2: spec.sigma2,
        m,
        m_inv,
        var_sigma2: spec.sigma2 * spec.sigma2 * (mu4 - 1.0),
        k_used: k,
        mu4,
    })
}

/// `∂_γ log h(λ)`: closed form for FARIMA families, central differences for LM.
fn dlog_shape(family: Family, gamma: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let frac = -2.0 * (2.0 * (0.5 * lambda).sin()).ln();
    Ok(match family {
        Family::Farima00 => vec![frac],
        Family::Farima10 => {
            let a = gamma[1];
            let c = lambda.cos();
            vec![frac, 2.0 * (c - a) / (1.0 - 2.0 * a * c + a * a)]
        }
        Family::Lm => {
            let h = 1e-5;
            let d = gamma[0];
            let up = spectral_shape(family, &[d + h], lambda)?.ln();
            let dn = spectral_shape(family, &[d - h], lambda)?.ln();
            vec![(up - dn) / (2.0 * h)]
        }
    })
}

/// Whittle information `(4π)^{-1} ∫_{-π}^{π} ∂_γ log f ∂_γ log fᵀ dλ`.
pub fn whittle_information(spec: &ModelSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let gamma = spec.gamma();
    let p = gamma.len();
    let tol = if spec.family == Family::Lm { 1e-7 } else { 1e-10 };
    // Split where the LM transfer function switches representation.
    let cut = 0.01;
    let mut out = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in 0..=a {
            let integrand = |l: f64, _gap: f64| {
                let g = dlog_shape(spec.family, &gamma, l).unwrap_or_else(|_| vec![f64::NAN; p]);
                g[a] * g[b]
            };
            let v = tanh_sinh(integrand, 0.0, cut, tol) + tanh_sinh(integrand, cut, PI, tol);
            // even integrand: (4π)^{-1} · 2 ∫_0^π
            let v = v / (2.0 * PI);
            if !v.is_finite() {
                return Err(Error::Domain("whittle information integrand is not finite".into()));
            }
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    Ok(out)
}
