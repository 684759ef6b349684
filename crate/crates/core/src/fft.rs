//! Thin wrappers over `rustfft` for the real-valued convolutions used across
//! the crate.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

pub(crate) fn forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

pub(crate) fn inverse(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
}

fn to_complex(x: &[f64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (o, &v) in out.iter_mut().zip(x) {
        o.re = v;
    }
    out
}

/// Full linear convolution of two real sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut fa = to_complex(a, size);
    let mut fb = to_complex(b, size);
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..out_len].iter().map(|c| c.re * scale).collect()
}

/// Cross-correlation `out[k] = Σ_{i < a.len()} a[i] b[i + k]` for `k = 0..=maxlag`.
///
/// Requires `b.len() >= a.len() + maxlag`.
pub fn correlate(a: &[f64], b: &[f64], maxlag: usize) -> Vec<f64> {
    assert!(b.len() >= a.len() + maxlag);
    let size = (a.len() + b.len()).next_power_of_two();
    let mut fa = to_complex(a, size);
    let mut fb = to_complex(b, size);
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = x.conj() * y;
    }
    inverse(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..=maxlag].iter().map(|c| c.re * scale).collect()
}

/// Product of the symmetric Toeplitz matrix with first column `col` and `x`.
pub fn toeplitz_matvec(col: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(col.len() >= n);
    let size = (2 * n).next_power_of_two();
    let mut ring = vec![Complex64::new(0.0, 0.0); size];
    ring[0].re = col[0];
    for k in 1..n {
        ring[k].re = col[k];
        ring[size - k].re = col[k];
    }
    let mut fx = to_complex(x, size);
    forward(&mut ring);
    forward(&mut fx);
    for (a, b) in fx.iter_mut().zip(&ring) {
        *a *= b;
    }
    inverse(&mut fx);
    let scale = 1.0 / size as f64;
    fx[..n].iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolve_matches_direct() {
        let a = [1.0, 2.0, -1.0, 0.5];
        let b = [0.3, -0.2, 4.0];
        let got = convolve(&a, &b);
        let mut want = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                want[i + j] += x * y;
            }
        }
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn correlate_matches_direct() {
        let a: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).cos()).collect();
        let got = correlate(&a, &b, 5);
        for k in 0..=5 {
            let want: f64 = (0..a.len()).map(|i| a[i] * b[i + k]).sum();
            assert!((got[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn toeplitz_matvec_matches_dense() {
        let col: Vec<f64> = (0..9).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).sin()).collect();
        let got = toeplitz_matvec(&col, &x);
        for i in 0..9usize {
            let want: f64 = (0..9).map(|j| col[i.abs_diff(j)] * x[j]).sum();
            assert!((got[i] - want).abs() < 1e-12);
        }
    }
}
