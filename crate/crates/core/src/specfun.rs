//! Special functions used by the coefficient engines.
//!
//! Everything here is pure `f64` arithmetic: log-gamma (Stirling series with
//! upward recurrence, plus Taylor expansions around the two real zeros), the
//! Riemann zeta function and its first two derivatives on `s > 1` by
//! Euler–Maclaurin summation, and the Beta function.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ζ(k) for k = 2..=30.
const ZETA_INT: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926,
    1.000_000_059_608_189,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

/// Stirling correction coefficients B_{2k} / (2k (2k-1)), k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if (x - 1.0).abs() < 0.2 {
        return ln_gamma_1p(x - 1.0);
    }
    if (x - 2.0).abs() < 0.2 {
        let z = x - 2.0;
        return ln_gamma_1p(z) + z.ln_1p();
    }
    if x >= 10.0 {
        return stirling(x);
    }
    // Shift into the Stirling range: Γ(x) = Γ(x + m) / (x (x+1) ... (x+m-1)).
    let mut shift = 1.0;
    let mut y = x;
    while y < 10.0 {
        shift *= y;
        y += 1.0;
    }
    stirling(y) - shift.ln()
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// ln Γ(1 + z) for |z| < 0.2 from its Taylor series.
fn ln_gamma_1p(z: f64) -> f64 {
    let mut sum = -EULER_GAMMA * z;
    let mut p = -z;
    for (i, zk) in ZETA_INT.iter().enumerate() {
        let k = (i + 2) as f64;
        p *= -z;
        sum += zk * p / k;
    }
    sum
}

/// Γ(a) / Γ(b) evaluated in log space.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

/// Euler's Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta_fn requires a, b > 0, got ({a}, {b})")));
    }
    Ok((ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b)).exp())
}

/// Which derivative of ζ to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaOrder {
    Value,
    First,
    Second,
}

impl TryFrom<u8> for ZetaOrder {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            0 => Ok(Self::Value),
            1 => Ok(Self::First),
            2 => Ok(Self::Second),
            _ => Err(Error::Domain(format!("zeta derivative order must be 0, 1 or 2, got {order}"))),
        }
    }
}

/// Riemann ζ(s) or one of its first two derivatives, for real `s > 1`.
pub fn riemann_zeta(s: f64, order: u8) -> Result<f64> {
    let order = ZetaOrder::try_from(order)?;
    let jet = zeta_jet(s)?;
    Ok(match order {
        ZetaOrder::Value => jet.v,
        ZetaOrder::First => jet.d1,
        ZetaOrder::Second => jet.d2,
    })
}

/// (ζ(s), ζ′(s), ζ″(s)) in one pass.
pub fn zeta_with_derivatives(s: f64) -> Result<(f64, f64, f64)> {
    let j = zeta_jet(s)?;
    Ok((j.v, j.d1, j.d2))
}

/// Truncated Taylor jet f, f', f'' in the variable s.
#[derive(Debug, Clone, Copy)]
struct Jet {
    v: f64,
    d1: f64,
    d2: f64,
}

impl Jet {
    const ZERO: Jet = Jet { v: 0.0, d1: 0.0, d2: 0.0 };

    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    fn scale(self, c: f64) -> Jet {
        Jet { v: self.v * c, d1: self.d1 * c, d2: self.d2 * c }
    }

    /// n^{-s - shift} as a function of s.
    fn inv_pow(n: f64, s: f64, shift: f64) -> Jet {
        let l = n.ln();
        let v = (-(s + shift) * l).exp();
        Jet { v, d1: -l * v, d2: l * l * v }
    }
}

const ZETA_CUTOFF: usize = 20;
/// B_2/2!, B_4/4!, B_6/6!
const EM_BERNOULLI: [f64; 3] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30_240.0];

fn zeta_jet(s: f64) -> Result<Jet> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("riemann_zeta requires s > 1, got {s}")));
    }
    Ok(em_jet(s))
}

/// Analytic continuation of ζ for real `s > -5`, `s != 1`.
pub(crate) fn zeta_continued(s: f64) -> f64 {
    debug_assert!(s > -5.0 && s != 1.0);
    em_jet(s).v
}

fn em_jet(s: f64) -> Jet {
    let n = ZETA_CUTOFF as f64;
    let mut sum = Jet::ZERO;
    for k in 1..ZETA_CUTOFF {
        sum = sum.add(Jet::inv_pow(k as f64, s, 0.0));
    }
    // Integral of the tail: N^{1-s} / (s - 1).
    let inv = 1.0 / (s - 1.0);
    let recip = Jet { v: inv, d1: -inv * inv, d2: 2.0 * inv * inv * inv };
    sum = sum.add(Jet::inv_pow(n, s, -1.0).mul(recip));
    // Half endpoint term.
    sum = sum.add(Jet::inv_pow(n, s, 0.0).scale(0.5));
    // Bernoulli corrections: B_{2k}/(2k)! * s (s+1) ... (s+2k-2) * N^{-s-2k+1}.
    let mut poly = Jet { v: s, d1: 1.0, d2: 0.0 };
    for (k, b) in EM_BERNOULLI.iter().enumerate() {
        let k = k + 1;
        if k > 1 {
            let j = (2 * k - 3) as f64;
            poly = poly.mul(Jet { v: s + j, d1: 1.0, d2: 0.0 });
            poly = poly.mul(Jet { v: s + j + 1.0, d1: 1.0, d2: 0.0 });
        }
        let term = poly.mul(Jet::inv_pow(n, s, (2 * k - 1) as f64)).scale(*b);
        sum = sum.add(term);
    }
    sum
}

/// Γ(d)Γ(1-d) from the reflection formula.
pub fn reflection(d: f64) -> f64 {
    PI / (PI * d).sin()
}
