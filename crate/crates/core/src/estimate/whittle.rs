//! Periodogram, model spectral densities and the Whittle estimator.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::models::{ar_coeffs_gamma, validate_gamma, Bounds, Family, ModelSpec};
use crate::simulate::Series;
use crate::specfun::{ln_gamma_pos, zeta_continued, zeta_with_derivatives};

use super::{check_series_len, minimize_contrast, Estimator, FitResult};

/// AR truncation used for the LM transfer function.
pub const LM_SPECTRAL_TRUNCATION: usize = 100_000;
/// Below this frequency the LM transfer function uses the polylogarithm expansion.
const LM_SMALL_FREQ: f64 = 0.01;

/// Periodogram ordinates at Fourier frequencies `λ_j = 2πj/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
}

fn dft_power(series: &Series) -> Vec<f64> {
    let x = series.values();
    let n = x.len();
    let mean = series.mean();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    fft::forward(&mut buf);
    let norm = 1.0 / (2.0 * PI * n as f64);
    buf.iter().map(|c| c.norm_sqr() * norm).collect()
}

/// Mean-removed periodogram at `j = 1..=⌊(n-1)/2⌋`.
pub fn periodogram(series: &Series) -> Result<Periodogram> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("periodogram needs n >= 4, got {n}")));
    }
    let p = dft_power(series);
    let m = (n - 1) / 2;
    Ok(Periodogram {
        freqs: (1..=m).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
        values: p[1..=m].to_vec(),
    })
}

/// Mean-removed periodogram at every nonzero Fourier frequency `j = 1..n`.
pub fn periodogram_full(series: &Series) -> Result<Periodogram> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("periodogram needs n >= 4, got {n}")));
    }
    let p = dft_power(series);
    Ok(Periodogram {
        freqs: (1..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect(),
        values: p[1..].to_vec(),
    })
}

fn frac_shape(d: f64, lambda: f64) -> f64 {
    (2.0 * (0.5 * lambda).sin()).powf(-2.0 * d)
}

fn ar1_shape(alpha: f64, lambda: f64) -> f64 {
    1.0 / (1.0 - 2.0 * alpha * lambda.cos() + alpha * alpha)
}

/// Tail `Σ_{k>K} u_k z^k` by two steps of summation by parts, `z = e^{-iλ}`.
fn lm_tail(d: f64, zeta: f64, k: usize, z: Complex64) -> Complex64 {
    let u = |j: usize| (-(1.0 + d) * (j as f64).ln()).exp() / zeta;
    let m = k + 1;
    let one_minus = Complex64::new(1.0, 0.0) - z;
    let zm = z.powu(m as u32);
    zm * u(m) / one_minus + zm * z * (u(m + 1) - u(m)) / (one_minus * one_minus)
}

/// `1 - U(λ)` for small λ from `Li_s(e^μ) = Γ(1-s)(-μ)^{s-1} + Σ_k ζ(s-k) μ^k/k!`.
fn lm_one_minus_u_small(d: f64, zeta: f64, lambda: f64) -> Complex64 {
    let mu = Complex64::new(0.0, -lambda);
    // Γ(-d) = -Γ(1-d)/d
    let gamma_neg = -ln_gamma_pos(1.0 - d).exp() / d;
    let lead = Complex64::from_polar(lambda.powf(d), 0.5 * PI * d) * gamma_neg;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for j in 1..=4 {
        pow *= mu;
        fact *= j as f64;
        series += pow * (zeta_continued(1.0 + d - j as f64) / fact);
    }
    -(lead + series) / zeta
}

/// Pointwise LM transfer function `1 - Σ_k u_k e^{-ikλ}`.
fn lm_one_minus_u(d: f64, lambda: f64) -> Result<Complex64> {
    let (zeta, _, _) = zeta_with_derivatives(1.0 + d)?;
    if lambda < LM_SMALL_FREQ {
        return Ok(lm_one_minus_u_small(d, zeta, lambda));
    }
    let k = LM_SPECTRAL_TRUNCATION;
    let u = ar_coeffs_gamma(Family::Lm, &[d], k)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &uj) in u.iter().enumerate().skip(1) {
        let (s, c) = (j as f64 * lambda).sin_cos();
        acc += Complex64::new(c, -s) * uj;
    }
    acc += lm_tail(d, zeta, k, Complex64::from_polar(1.0, -lambda));
    Ok(Complex64::new(1.0, 0.0) - acc)
}

/// Normalised spectral shape `h = 2π f / σ²` at one frequency.
pub(crate) fn spectral_shape(family: Family, gamma: &[f64], lambda: f64) -> Result<f64> {
    validate_gamma(family, gamma)?;
    Ok(match family {
        Family::Farima00 => frac_shape(gamma[0], lambda),
        Family::Farima10 => frac_shape(gamma[0], lambda) * ar1_shape(gamma[1], lambda),
        Family::Lm => 1.0 / lm_one_minus_u(gamma[0], lambda)?.norm_sqr(),
    })
}

/// Spectral density `f(λ)` of `spec`, for `λ ∈ (0, π]`.
pub fn spectral_density(spec: &ModelSpec, lambda: f64) -> Result<f64> {
    spec.validate()?;
    if !(lambda > 0.0 && lambda <= PI) {
        return Err(Error::Domain(format!("spectral density needs λ in (0, π], got {lambda}")));
    }
    Ok(spec.sigma2 / (2.0 * PI) * spectral_shape(spec.family, &spec.gamma(), lambda)?)
}

/// Spectral shapes at `λ_j = 2πj/n`, `j = 1..=m`.
fn shapes_at_fourier(family: Family, gamma: &[f64], n: usize, freqs: &[f64]) -> Result<Vec<f64>> {
    validate_gamma(family, gamma)?;
    match family {
        Family::Farima00 | Family::Farima10 => freqs.iter().map(|&l| spectral_shape(family, gamma, l)).collect(),
        Family::Lm => {
            // Fold the AR weights modulo n so that one FFT gives U(λ_j).
            let d = gamma[0];
            let (zeta, _, _) = zeta_with_derivatives(1.0 + d)?;
            let k = LM_SPECTRAL_TRUNCATION.max(n);
            let u = ar_coeffs_gamma(family, gamma, k)?;
            let mut folded = vec![Complex64::new(0.0, 0.0); n];
            for (j, &uj) in u.iter().enumerate().skip(1) {
                folded[j % n].re += uj;
            }
            fft::forward(&mut folded);
            Ok(freqs
                .iter()
                .enumerate()
                .map(|(i, &l)| {
                    let total = folded[i + 1] + lm_tail(d, zeta, k, Complex64::from_polar(1.0, -l));
                    1.0 / (Complex64::new(1.0, 0.0) - total).norm_sqr()
                })
                .collect())
        }
    }
}

/// Profiled Whittle contrast `log(mean I/h) + mean log h`.
fn profiled_contrast(values: &[f64], shapes: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let ratio = values.iter().zip(shapes).map(|(i, h)| i / h).sum::<f64>() / m;
    let logs = shapes.iter().map(|h| h.ln()).sum::<f64>() / m;
    (ratio.ln() + logs, ratio)
}

/// Whittle estimator; σ² is profiled out as `σ̂² = (2π/m) Σ_j I(λ_j)/h(λ_j)`.
///
/// `objective` is the full contrast `Σ_j [log f(λ_j) + I(λ_j)/f(λ_j)]` at the
/// estimate.
pub fn fit_whittle(series: &Series, family: Family, bounds: &Bounds) -> Result<FitResult> {
    let small = check_series_len(series.len())?;
    let n = series.len();
    let pg = periodogram(series)?;
    if pg.values.iter().all(|&v| v == 0.0) {
        return Err(Error::FitFailed("periodogram vanishes (constant series)".into()));
    }
    let contrast = |g: &[f64]| match shapes_at_fourier(family, g, n, &pg.freqs) {
        Ok(h) => profiled_contrast(&pg.values, &h).0,
        Err(_) => f64::INFINITY,
    };
    let m = minimize_contrast(family, bounds, contrast)?;
    let shapes = shapes_at_fourier(family, &m.gamma, n, &pg.freqs)?;
    let (_, ratio) = profiled_contrast(&pg.values, &shapes);
    let sigma2_hat = 2.0 * PI * ratio;
    let count = pg.values.len() as f64;
    let objective = shapes.iter().map(|h| (sigma2_hat * h / (2.0 * PI)).ln()).sum::<f64>() + count;
    Ok(FitResult {
        estimator: Estimator::Whittle,
        family,
        gamma_hat: m.gamma,
        sigma2_hat,
        stderr: None,
        objective,
        iterations: m.evaluations,
        converged: m.converged,
        boundary_pinned: m.pinned,
        small_sample: small,
        n,
    })
}
