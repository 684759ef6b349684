//! Gaussian QMLE via truncated one-step predictors
//! `m̂_t = Σ_{i=1}^{t-1} u_i X_{t-i}`.

use crate::error::{Error, Result};
use crate::models::{ar_coeffs_gamma, dar_coeffs_gamma, validate_gamma, Bounds, Family, ModelSpec};
use crate::simulate::Series;

use super::{check_series_len, minimize_contrast, Estimator, FitResult};

/// Dot product with four independent accumulators.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0f64; 4];
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// All truncated predictors `m̂_1..m̂_n` (0-based output) for AR weights `u`
/// (natural indexing, `u.len() >= x.len()`).
pub fn truncated_predictors(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(u.len() >= n);
    let xr: Vec<f64> = x.iter().rev().copied().collect();
    (0..n).map(|t| dot(&u[1..=t], &xr[n - t..])).collect()
}

/// `m̂_t(γ)` for a 1-based index `t`.
pub fn truncated_predictor(series: &Series, family: Family, gamma: &[f64], t: usize) -> Result<f64> {
    let n = series.len();
    if t == 0 || t > n {
        return Err(Error::InvalidInput(format!("predictor index {t} outside 1..={n}")));
    }
    validate_gamma(family, gamma)?;
    let u = ar_coeffs_gamma(family, gamma, t)?;
    let x = series.values();
    Ok((1..t).map(|i| u[i] * x[t - 1 - i]).sum())
}

fn residual_ss(x: &[f64], xr: &[f64], u: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for t in 0..n {
        let e = x[t] - dot(&u[1..=t], &xr[n - t..]);
        s += e * e;
    }
    s
}

/// `S_n(γ) = Σ_t (X_t - m̂_t(γ))²`.
pub fn qmle_objective(series: &Series, family: Family, gamma: &[f64]) -> Result<f64> {
    check_series_len(series.len())?;
    validate_gamma(family, gamma)?;
    let x = series.values();
    let u = ar_coeffs_gamma(family, gamma, x.len())?;
    let xr: Vec<f64> = x.iter().rev().copied().collect();
    Ok(residual_ss(x, &xr, &u))
}

/// `∂S_n/∂γ = -2 Σ_t ∂_γ m̂_t (X_t - m̂_t)`.
pub fn qmle_gradient(series: &Series, family: Family, gamma: &[f64]) -> Result<Vec<f64>> {
    check_series_len(series.len())?;
    validate_gamma(family, gamma)?;
    let x = series.values();
    let n = x.len();
    let u = ar_coeffs_gamma(family, gamma, n)?;
    let du = dar_coeffs_gamma(family, gamma, n)?;
    let xr: Vec<f64> = x.iter().rev().copied().collect();
    let mut grad = vec![0.0; du.len()];
    for t in 0..n {
        let past = &xr[n - t..];
        let e = x[t] - dot(&u[1..=t], past);
        for (g, dc) in grad.iter_mut().zip(&du) {
            *g -= 2.0 * e * dot(&dc[1..=t], past);
        }
    }
    Ok(grad)
}

/// Quasi conditional log-likelihood `Î_n(θ) = -(n/2) log σ² - S_n(γ)/(2σ²)`
/// (additive constants dropped).
pub fn quasi_loglik(series: &Series, spec: &ModelSpec) -> Result<f64> {
    let s = qmle_objective(series, spec.family, &spec.gamma())?;
    let n = series.len() as f64;
    Ok(-0.5 * n * spec.sigma2.ln() - s / (2.0 * spec.sigma2))
}

/// QMLE of `(γ, σ²)`: γ̂ minimises [`qmle_objective`] and σ̂² = S_n(γ̂)/n.
pub fn fit_qmle(series: &Series, family: Family, bounds: &Bounds) -> Result<FitResult> {
    let small = check_series_len(series.len())?;
    let x = series.values();
    let n = x.len();
    let xr: Vec<f64> = x.iter().rev().copied().collect();
    let contrast = |g: &[f64]| match ar_coeffs_gamma(family, g, n) {
        Ok(u) => residual_ss(x, &xr, &u),
        Err(_) => f64::INFINITY,
    };
    let m = minimize_contrast(family, bounds, contrast)?;
    let sigma2_hat = m.value / n as f64;
    if !(sigma2_hat > 0.0) {
        return Err(Error::FitFailed(format!("degenerate residual variance {sigma2_hat}")));
    }
    Ok(FitResult {
        estimator: Estimator::Qmle,
        family,
        gamma_hat: m.gamma,
        sigma2_hat,
        stderr: None,
        objective: m.value,
        iterations: m.evaluations,
        converged: m.converged,
        boundary_pinned: m.pinned,
        small_sample: small,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{simulate, white_noise, GenConfig};

    fn series(v: Vec<f64>) -> Series {
        Series::new(v).unwrap()
    }

    /// Independent evaluation: explicit double loop with coefficients from the
    /// closed-form recursion `u_k = u_{k-1}(k-1-d)/k`.
    fn naive_objective_farima00(x: &[f64], d: f64) -> f64 {
        let n = x.len();
        let mut u = vec![0.0; n];
        if n > 1 {
            u[1] = d;
        }
        for k in 2..n {
            u[k] = u[k - 1] * (k as f64 - 1.0 - d) / k as f64;
        }
        let mut s = 0.0;
        for t in 0..n {
            let mut m = 0.0;
            for i in 1..=t {
                m += u[i] * x[t - i];
            }
            s += (x[t] - m) * (x[t] - m);
        }
        s
    }

    #[test]
    fn dot_matches_naive() {
        for len in [0, 1, 3, 4, 7, 16, 33] {
            let a: Vec<f64> = (0..len).map(|i| (i as f64).sin()).collect();
            let b: Vec<f64> = (0..len).map(|i| (i as f64 * 0.3).cos()).collect();
            let want: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            assert!((dot(&a, &b) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn predictor_edge_cases() {
        let s = series(white_noise(50, 1));
        let g = [0.3];
        assert_eq!(truncated_predictor(&s, Family::Farima00, &g, 1).unwrap(), 0.0);
        let p2 = truncated_predictor(&s, Family::Farima00, &g, 2).unwrap();
        assert!((p2 - 0.3 * s.values()[0]).abs() < 1e-15);
        assert!(truncated_predictor(&s, Family::Farima00, &g, 0).is_err());
        assert!(truncated_predictor(&s, Family::Farima00, &g, 51).is_err());
    }

    #[test]
    fn predictor_matches_double_loop() {
        let s = series(white_noise(50, 2));
        let x = s.values();
        let d = 0.3;
        let mut want = 0.0;
        for i in 1..50 {
            let mut u = d;
            for k in 2..=i {
                u *= (k as f64 - 1.0 - d) / k as f64;
            }
            want += u * x[50 - 1 - i];
        }
        let got = truncated_predictor(&s, Family::Farima00, &[d], 50).unwrap();
        assert!((got - want).abs() < 1e-12);
        let u = ar_coeffs_gamma(Family::Farima00, &[d], 50).unwrap();
        let all = truncated_predictors(x, &u);
        assert_eq!(all[0], 0.0);
        assert!((all[49] - want).abs() < 1e-12);
    }

    #[test]
    fn zero_series_has_zero_objective() {
        let s = series(vec![0.0; 40]);
        for fam in Family::ALL {
            let g = if fam == Family::Farima10 { vec![0.2, 0.4] } else { vec![0.2] };
            assert_eq!(qmle_objective(&s, fam, &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn objective_matches_independent_evaluation() {
        let spec = ModelSpec::farima00(0.25, 1.0).unwrap();
        let s = simulate(&spec, 200, &GenConfig::exact(5)).unwrap();
        for j in 0..21 {
            let d = 0.01 + 0.48 * j as f64 / 20.0;
            let got = qmle_objective(&s, Family::Farima00, &[d]).unwrap();
            let want = naive_objective_farima00(s.values(), d);
            assert!(((got - want) / want).abs() < 1e-10, "d={d}: {got} vs {want}");
        }
    }

    #[test]
    fn objective_is_homogeneous() {
        let s = series(white_noise(120, 9));
        let c = 3.7;
        let sc = s.map(|v| c * v).unwrap();
        for fam in Family::ALL {
            let g = if fam == Family::Farima10 { vec![0.3, -0.4] } else { vec![0.3] };
            let a = qmle_objective(&s, fam, &g).unwrap();
            let b = qmle_objective(&sc, fam, &g).unwrap();
            assert!((b / a - c * c).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let spec = ModelSpec::farima10(0.2, 0.3, 1.0).unwrap();
        let s = simulate(&spec, 300, &GenConfig::exact(21)).unwrap();
        for fam in Family::ALL {
            let g = if fam == Family::Farima10 { vec![0.25, 0.2] } else { vec![0.25] };
            let grad = qmle_gradient(&s, fam, &g).unwrap();
            for c in 0..g.len() {
                let h = 1e-6;
                let mut gp = g.clone();
                let mut gm = g.clone();
                gp[c] += h;
                gm[c] -= h;
                let fd = (qmle_objective(&s, fam, &gp).unwrap() - qmle_objective(&s, fam, &gm).unwrap()) / (2.0 * h);
                assert!(((grad[c] - fd) / fd).abs() < 1e-5, "{fam} c={c}: {} vs {fd}", grad[c]);
            }
        }
    }

    #[test]
    fn fit_recovers_d_and_sigma_identity() {
        let spec = ModelSpec::farima00(0.2, 4.0).unwrap();
        let s = simulate(&spec, 3000, &GenConfig::exact(2024)).unwrap();
        let fit = fit_qmle(&s, Family::Farima00, &Bounds::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.d_hat() - 0.2).abs() < 0.05, "{}", fit.d_hat());
        let obj = qmle_objective(&s, Family::Farima00, &fit.gamma_hat).unwrap();
        assert!((fit.sigma2_hat - obj / 3000.0).abs() <= 1e-12 * fit.sigma2_hat);
        assert_eq!(fit.objective, obj);
    }

    #[test]
    fn fit_maximises_quasi_likelihood_over_grid() {
        let spec = ModelSpec::lm(0.3, 1.0).unwrap();
        let s = simulate(&spec, 400, &GenConfig::exact(8)).unwrap();
        let fit = fit_qmle(&s, Family::Lm, &Bounds::default()).unwrap();
        let best = quasi_loglik(&s, &fit.spec(Bounds::default()).unwrap()).unwrap();
        for j in 0..=10 {
            let d = 0.02 + 0.046 * j as f64;
            let sig = qmle_objective(&s, Family::Lm, &[d]).unwrap() / 400.0;
            for scale in [0.8, 1.0, 1.25] {
                let comp = ModelSpec::lm(d, sig * scale).unwrap();
                assert!(best >= quasi_loglik(&s, &comp).unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn fit_is_scale_invariant() {
        let spec = ModelSpec::farima00(0.3, 1.0).unwrap();
        let s = simulate(&spec, 500, &GenConfig::exact(3)).unwrap();
        let c = 5.0;
        let a = fit_qmle(&s, Family::Farima00, &Bounds::default()).unwrap();
        let b = fit_qmle(&s.map(|v| c * v).unwrap(), Family::Farima00, &Bounds::default()).unwrap();
        assert!((a.d_hat() - b.d_hat()).abs() < 1e-9);
        assert!((b.sigma2_hat / a.sigma2_hat - c * c).abs() < 1e-6);
    }

    #[test]
    fn fit_flags_small_samples() {
        let s = series(white_noise(20, 4));
        let fit = fit_qmle(&s, Family::Farima00, &Bounds::default()).unwrap();
        assert!(fit.small_sample);
        assert!(fit_qmle(&series(vec![1.0]), Family::Farima00, &Bounds::default()).is_err());
    }
}
