//! Model catalogue and coefficient engines.
//!
//! Every family is described by its MA(∞) weights `a_i` (unit innovation
//! variance, `a_0 = 1`) and by the AR(∞) weights `u_k` of
//! `X_t = σ ε_t + Σ_{k≥1} u_k X_{t-k}`, which sum to one. The two sequences
//! are tied by `Σ_{j=0}^{k-1} u_{k-j} a_j = a_k` for every `k ≥ 1`.
//!
//! Coefficient vectors use natural indexing: `u[k]` is `u_k` and `u[0]` is
//! stored as zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::specfun::{ln_gamma_pos, zeta_with_derivatives};

/// Parametric long-memory families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Fractional noise `(1-B)^{-d} ε`.
    #[serde(rename = "FARIMA00", alias = "farima00", alias = "FARIMA")]
    Farima00,
    /// `(1-αB)^{-1}(1-B)^{-d} ε`.
    #[serde(rename = "FARIMA10", alias = "farima10")]
    Farima10,
    /// AR(∞) with `u_k = k^{-1-d} / ζ(1+d)`.
    #[serde(rename = "LM", alias = "lm")]
    Lm,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Farima00, Family::Farima10, Family::Lm];

    /// Number of γ coordinates.
    pub fn dim(self) -> usize {
        match self {
            Family::Farima10 => 2,
            Family::Farima00 | Family::Lm => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Farima00 => "FARIMA00",
            Family::Farima10 => "FARIMA10",
            Family::Lm => "LM",
        }
    }

    /// Names of the γ coordinates.
    pub fn gamma_names(self) -> &'static [&'static str] {
        match self {
            Family::Farima10 => &["d", "alpha"],
            Family::Farima00 | Family::Lm => &["d"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['(', ')', ',', '-', '_'], "").as_str() {
            "farima00" | "farima0d0" | "farima" | "fn" => Ok(Family::Farima00),
            "farima10" | "farima1d0" => Ok(Family::Farima10),
            "lm" => Ok(Family::Lm),
            _ => Err(Error::InvalidInput(format!("unknown family `{s}`"))),
        }
    }
}

/// Closed interval.
pub type Interval = (f64, f64);

/// Admissible parameter box Θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub d: Interval,
    pub alpha: Interval,
    pub sigma2: Interval,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { d: (0.01, 0.49), alpha: (-0.99, 0.99), sigma2: (1e-6, 1e6) }
    }
}

impl Bounds {
    /// Per-coordinate γ intervals for `family`.
    pub fn gamma(&self, family: Family) -> Vec<Interval> {
        match family {
            Family::Farima10 => vec![self.d, self.alpha],
            Family::Farima00 | Family::Lm => vec![self.d],
        }
    }

    fn check(&self) -> Result<()> {
        let ok = |(lo, hi): Interval| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !(ok(self.d) && ok(self.alpha) && ok(self.sigma2)) {
            return Err(Error::InvalidSpec(format!("malformed bounds {self:?}")));
        }
        if self.d.0 <= 0.0 || self.d.1 >= 0.5 {
            return Err(Error::InvalidSpec(format!("d bounds {:?} must lie inside (0, 1/2)", self.d)));
        }
        if self.alpha.0 <= -1.0 || self.alpha.1 >= 1.0 {
            return Err(Error::InvalidSpec(format!("alpha bounds {:?} must lie inside (-1, 1)", self.alpha)));
        }
        if self.sigma2.0 <= 0.0 {
            return Err(Error::InvalidSpec("sigma2 lower bound must be positive".into()));
        }
        Ok(())
    }
}

/// A fully parameterised model θ = (γ, σ²) with location μ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub d: f64,
    /// AR(1) coefficient; only meaningful for [`Family::Farima10`], zero otherwise.
    #[serde(default)]
    pub alpha: f64,
    pub sigma2: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub bounds: Bounds,
}

impl ModelSpec {
    pub fn farima00(d: f64, sigma2: f64) -> Result<Self> {
        Self::new(Family::Farima00, &[d], sigma2)
    }

    pub fn farima10(d: f64, alpha: f64, sigma2: f64) -> Result<Self> {
        Self::new(Family::Farima10, &[d, alpha], sigma2)
    }

    pub fn lm(d: f64, sigma2: f64) -> Result<Self> {
        Self::new(Family::Lm, &[d], sigma2)
    }

    /// Builds and validates a spec with default bounds and `μ = 0`.
    pub fn new(family: Family, gamma: &[f64], sigma2: f64) -> Result<Self> {
        Self::with_bounds(family, gamma, sigma2, Bounds::default())
    }

    pub fn with_bounds(family: Family, gamma: &[f64], sigma2: f64, bounds: Bounds) -> Result<Self> {
        if gamma.len() != family.dim() {
            return Err(Error::InvalidSpec(format!(
                "{family} expects {} gamma coordinate(s), got {}",
                family.dim(),
                gamma.len()
            )));
        }
        let spec = Self {
            family,
            d: gamma[0],
            alpha: gamma.get(1).copied().unwrap_or(0.0),
            sigma2,
            mu: 0.0,
            bounds,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn gamma(&self) -> Vec<f64> {
        match self.family {
            Family::Farima10 => vec![self.d, self.alpha],
            Family::Farima00 | Family::Lm => vec![self.d],
        }
    }

    /// Same family and bounds, different γ (σ² and μ kept).
    pub fn with_gamma(&self, gamma: &[f64]) -> Result<Self> {
        let mut s = Self::with_bounds(self.family, gamma, self.sigma2, self.bounds)?;
        s.mu = self.mu;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.check()?;
        validate_gamma(self.family, &self.gamma())?;
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::InvalidSpec(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidSpec("mu must be finite".into()));
        }
        if self.family != Family::Farima10 && self.alpha != 0.0 {
            return Err(Error::InvalidSpec(format!("{} has no alpha parameter", self.family)));
        }
        let inside = |x: f64, (lo, hi): Interval| x >= lo && x <= hi;
        for (x, iv) in self.gamma().into_iter().zip(self.bounds.gamma(self.family)) {
            if !inside(x, iv) {
                return Err(Error::InvalidSpec(format!("parameter {x} outside bounds {iv:?}")));
            }
        }
        if !inside(self.sigma2, self.bounds.sigma2) {
            return Err(Error::InvalidSpec(format!(
                "sigma2 {} outside bounds {:?}",
                self.sigma2, self.bounds.sigma2
            )));
        }
        Ok(())
    }
}

/// Checks that γ is an interior point of the model's natural domain.
pub fn validate_gamma(family: Family, gamma: &[f64]) -> Result<()> {
    if gamma.len() != family.dim() {
        return Err(Error::InvalidSpec(format!("{family}: wrong gamma length {}", gamma.len())));
    }
    let d = gamma[0];
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::InvalidSpec(format!("d must lie in (0, 1/2), got {d}")));
    }
    if family == Family::Farima10 {
        let a = gamma[1];
        if !(a > -1.0 && a < 1.0) {
            return Err(Error::InvalidSpec(format!("alpha must lie in (-1, 1), got {a}")));
        }
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("truncation K must be at least 1".into()));
    }
    Ok(())
}

/// Truncated MA(∞) and AR(∞) coefficients of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    /// `a_0..=a_K`
    pub a: Vec<f64>,
    /// `u_0..=u_K`, with `u_0 = 0`
    pub u: Vec<f64>,
    pub k: usize,
}

impl CoeffTable {
    pub fn new(spec: &ModelSpec, k: usize) -> Result<Self> {
        Ok(Self { a: ma_coeffs(spec, k)?, u: ar_coeffs(spec, k)?, k })
    }

    /// `max_{1≤k≤K} |Σ_{j<k} u_{k-j} a_j - a_k|`
    pub fn convolution_defect(&self) -> f64 {
        (1..=self.k)
            .map(|k| {
                let s: f64 = (0..k).map(|j| self.u[k - j] * self.a[j]).sum();
                (s - self.a[k]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// FARIMA(0,d,0) AR weights `u_k = d Γ(k-d) / (Γ(1-d) Γ(k+1))`, `k = 0..=K`.
fn frac_ar(d: f64, k: usize) -> Vec<f64> {
    let mut u = vec![0.0; k + 1];
    if k >= 1 {
        u[1] = d;
    }
    for j in 2..=k {
        let jf = j as f64;
        u[j] = u[j - 1] * (jf - 1.0 - d) / jf;
    }
    u
}

/// FARIMA(0,d,0) MA weights `a_i = Γ(i+d) / (Γ(i+1) Γ(d))`, `i = 0..=K`.
fn frac_ma(d: f64, k: usize) -> Vec<f64> {
    let mut a = vec![0.0; k + 1];
    a[0] = 1.0;
    for i in 1..=k {
        let fi = i as f64;
        a[i] = a[i - 1] * (fi - 1.0 + d) / fi;
    }
    a
}

/// MA(∞) weights `a_0..=a_K` in unit-noise normalisation.
pub fn ma_coeffs(spec: &ModelSpec, k: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    ma_coeffs_gamma(spec.family, &spec.gamma(), k)
}

pub(crate) fn ma_coeffs_gamma(family: Family, gamma: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    validate_gamma(family, gamma)?;
    let d = gamma[0];
    Ok(match family {
        Family::Farima00 => frac_ma(d, k),
        Family::Farima10 => {
            let alpha = gamma[1];
            let mut a = frac_ma(d, k);
            for i in 1..=k {
                a[i] += alpha * a[i - 1];
            }
            a
        }
        Family::Lm => {
            let u = ar_coeffs_gamma(family, gamma, k)?;
            invert_series(&ar_polynomial(&u))?
        }
    })
}

/// AR(∞) weights, `u[0] = 0` then `u_1..=u_K`.
pub fn ar_coeffs(spec: &ModelSpec, k: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    ar_coeffs_gamma(spec.family, &spec.gamma(), k)
}

/// AR weights at an arbitrary admissible γ (used inside the optimisers).
pub fn ar_coeffs_gamma(family: Family, gamma: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(k)?;
    validate_gamma(family, gamma)?;
    let d = gamma[0];
    Ok(match family {
        Family::Farima00 => frac_ar(d, k),
        Family::Farima10 => {
            // -(1-B)^d (1-αB) + 1
            let alpha = gamma[1];
            let f = frac_ar(d, k);
            let mut u = f.clone();
            u[1] = d + alpha;
            for j in 2..=k {
                u[j] = f[j] - alpha * f[j - 1];
            }
            u
        }
        Family::Lm => {
            let (z, _, _) = zeta_with_derivatives(1.0 + d)?;
            let mut u = vec![0.0; k + 1];
            for (j, uj) in u.iter_mut().enumerate().skip(1) {
                *uj = (-(1.0 + d) * (j as f64).ln()).exp() / z;
            }
            u
        }
    })
}

/// γ-derivatives of the AR weights; one vector per γ coordinate, same indexing as
/// [`ar_coeffs`].
pub fn dar_coeffs(spec: &ModelSpec, k: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    dar_coeffs_gamma(spec.family, &spec.gamma(), k)
}

pub fn dar_coeffs_gamma(family: Family, gamma: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
    check_k(k)?;
    validate_gamma(family, gamma)?;
    let d = gamma[0];
    // ∂_d u_k for fractional noise: u_k · ∂_d log u_k, with
    // ∂_d log u_1 = 1/d and ∂_d log u_k = ∂_d log u_{k-1} - 1/(k-1-d).
    let frac_dd = |f: &[f64]| {
        let mut out = vec![0.0; k + 1];
        let mut dlog = 1.0 / d;
        out[1] = f[1] * dlog;
        for j in 2..=k {
            dlog -= 1.0 / (j as f64 - 1.0 - d);
            out[j] = f[j] * dlog;
        }
        out
    };
    Ok(match family {
        Family::Farima00 => vec![frac_dd(&frac_ar(d, k))],
        Family::Farima10 => {
            let alpha = gamma[1];
            let f = frac_ar(d, k);
            let fd = frac_dd(&f);
            let mut dd = fd.clone();
            let mut da = vec![0.0; k + 1];
            dd[1] = 1.0;
            da[1] = 1.0;
            for j in 2..=k {
                dd[j] = fd[j] - alpha * fd[j - 1];
                da[j] = -f[j - 1];
            }
            vec![dd, da]
        }
        Family::Lm => {
            let (z, z1, _) = zeta_with_derivatives(1.0 + d)?;
            let mut out = vec![0.0; k + 1];
            for (j, o) in out.iter_mut().enumerate().skip(1) {
                let ln = (j as f64).ln();
                let p = (-(1.0 + d) * ln).exp();
                *o = -p / (z * z) * (z * ln + z1);
            }
            vec![out]
        }
    })
}

/// `1 - Σ u_k z^k` as a coefficient vector.
pub fn ar_polynomial(u: &[f64]) -> Vec<f64> {
    let mut p: Vec<f64> = u.iter().map(|x| -x).collect();
    p[0] = 1.0;
    p
}

/// Truncated product of two power series, keeping `len` coefficients.
pub fn series_product(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

const DIRECT_INVERSION_MAX: usize = 16_384;

/// Multiplicative inverse of the power series `c_0 + c_1 z + ...`, truncated to
/// the same length.
pub fn invert_series(c: &[f64]) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("cannot invert an empty series".into()));
    }
    if c[0] == 0.0 || !c[0].is_finite() {
        return Err(Error::InvalidInput("series inversion requires c_0 != 0".into()));
    }
    if c.len() <= DIRECT_INVERSION_MAX {
        Ok(invert_direct(c))
    } else {
        Ok(invert_newton(c))
    }
}

fn invert_direct(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut b = vec![0.0; n];
    b[0] = 1.0 / c[0];
    for k in 1..n {
        let s: f64 = (1..=k).map(|j| c[j] * b[k - j]).sum();
        b[k] = -s / c[0];
    }
    b
}

/// Newton iteration `b ← b (2 - c b)`, doubling the precision each step, with FFT
/// products. The seed block is solved directly.
fn invert_newton(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut b = invert_direct(&c[..DIRECT_INVERSION_MAX.min(n)]);
    while b.len() < n {
        let m = (2 * b.len()).min(n);
        let cb = fft::convolve(&c[..m], &b);
        // e = 2 - c b, restricted to m terms
        let mut e: Vec<f64> = cb[..m].iter().map(|x| -x).collect();
        e[0] += 2.0;
        let nb = fft::convolve(&b, &e);
        b = nb[..m].to_vec();
    }
    b
}

/// Autocovariances `r_X(0..=maxlag)` including σ².
pub fn autocovariance(spec: &ModelSpec, maxlag: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    Ok(match spec.family {
        Family::Farima00 => farima00_acv(spec.d, spec.sigma2, maxlag),
        Family::Farima10 => farima10_acv(spec.d, spec.alpha, spec.sigma2, maxlag),
        Family::Lm => {
            let k = default_acv_truncation(maxlag);
            autocovariance_by_convolution(spec, maxlag, k)?
        }
    })
}

/// Truncation used by [`autocovariance`] for families without a closed form.
pub fn default_acv_truncation(maxlag: usize) -> usize {
    (4 * maxlag).max(10_000)
}

/// `σ² Γ(1-2d) Γ(k+d) / (Γ(d) Γ(1-d) Γ(k+1-d))` by its lag recursion.
fn farima00_acv(d: f64, sigma2: f64, maxlag: usize) -> Vec<f64> {
    let mut r = vec![0.0; maxlag + 1];
    r[0] = sigma2 * (ln_gamma_pos(1.0 - 2.0 * d) - 2.0 * ln_gamma_pos(1.0 - d)).exp();
    for k in 1..=maxlag {
        let kf = k as f64;
        r[k] = r[k - 1] * (kf - 1.0 + d) / (kf - d);
    }
    r
}

/// AR(1) filter applied to fractional noise:
/// `r_X(k) = (1-α²)^{-1} Σ_h α^{|h|} r_Y(k-h)`.
fn farima10_acv(d: f64, alpha: f64, sigma2: f64, maxlag: usize) -> Vec<f64> {
    let h = if alpha == 0.0 {
        0
    } else {
        ((1e-18f64).ln() / alpha.abs().ln()).ceil().max(1.0) as usize
    };
    let ry = farima00_acv(d, sigma2, maxlag + h);
    let mut pw = vec![1.0; h + 1];
    for j in 1..=h {
        pw[j] = pw[j - 1] * alpha;
    }
    let norm = 1.0 / (1.0 - alpha * alpha);
    (0..=maxlag)
        .map(|k| {
            let mut s = ry[k];
            for (j, p) in pw.iter().enumerate().skip(1) {
                s += p * (ry[k + j] + ry[k.abs_diff(j)]);
            }
            s * norm
        })
        .collect()
}

/// Autocovariance from the MA weights, `σ² Σ_{i≤K} a_i a_{i+k}` plus an analytic
/// tail for `i > K`.
///
/// The tail uses the two-term expansion `a_i ≈ c_1 i^{d-1} + c_2 i^{p}` matched at
/// `i = K` and `i = K/2`, where `p = 2d-2` for LM and `p = d-2` for the FARIMA
/// families, summed by Euler–Maclaurin. Requires `K ≥ 4·maxlag`.
pub fn autocovariance_by_convolution(spec: &ModelSpec, maxlag: usize, k: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let k = k.max(4 * maxlag).max(16);
    let a = ma_coeffs(spec, k + maxlag)?;
    let second = match spec.family {
        Family::Lm => 2.0 * spec.d - 2.0,
        Family::Farima00 | Family::Farima10 => spec.d - 2.0,
    };
    let mut r = acv_from_ma(&a, maxlag, spec.d, second);
    for x in &mut r {
        *x *= spec.sigma2;
    }
    Ok(r)
}

/// Unit-variance version of [`autocovariance_by_convolution`] on explicit weights
/// `a_0..=a_{K+maxlag}`.
pub fn acv_from_ma(a: &[f64], maxlag: usize, d: f64, second_exponent: f64) -> Vec<f64> {
    let k = a.len() - 1 - maxlag;
    let mut r = fft::correlate(&a[..=k], a, maxlag);
    let p1 = d - 1.0;
    let p2 = second_exponent;
    let (kf, hf) = (k as f64, (k / 2) as f64);
    // Solve c1 x^p1 + c2 x^p2 = a_x at x = K and x = K/2.
    let (m11, m12, m21, m22) = (kf.powf(p1), kf.powf(p2), hf.powf(p1), hf.powf(p2));
    let det = m11 * m22 - m12 * m21;
    let c1 = (a[k] * m22 - m12 * a[k / 2]) / det;
    let c2 = (m11 * a[k / 2] - m21 * a[k]) / det;
    let terms = [(c1, p1), (c2, p2)];
    for (lag, rv) in r.iter_mut().enumerate() {
        let mut tail = 0.0;
        for &(ci, pi) in &terms {
            for &(cj, pj) in &terms {
                tail += ci * cj * power_tail_sum(pi, pj, lag as f64, kf + 1.0);
            }
        }
        *rv += tail;
    }
    r
}

/// `Σ_{i ≥ start} i^p (i + lag)^q` for `p + q < -1` and `lag < start / 2`.
fn power_tail_sum(p: f64, q: f64, lag: f64, start: f64) -> f64 {
    let g = |x: f64| x.powf(p) * (x + lag).powf(q);
    let dg = |x: f64| g(x) * (p / x + q / (x + lag));
    // ∫_A^∞ x^p (x+k)^q dx = Σ_j C(q, j) k^j A^{p+q+1-j} / (j - p - q - 1)
    let ratio = lag / start;
    let mut integral = 0.0;
    let mut binom = 1.0;
    let mut rpow = 1.0;
    let base = start.powf(p + q + 1.0);
    for j in 0..200 {
        let jf = j as f64;
        let term = binom * rpow * base / (jf - p - q - 1.0);
        integral += term;
        if term.abs() < 1e-18 * integral.abs() {
            break;
        }
        binom *= (q - jf) / (jf + 1.0);
        rpow *= ratio;
    }
    integral + 0.5 * g(start) - dg(start) / 12.0
}
