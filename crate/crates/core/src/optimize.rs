//! Derivative-free bounded minimisers: Brent's method on an interval (with a
//! coarse grid scan to pick the bracket) and a box-projected Nelder–Mead.

/// Outcome of a minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's golden-section / parabolic minimisation on `[lo, hi]` with absolute
/// tolerance `xtol`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Minimum {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut evals = 1;
    let (mut d, mut e) = (0.0f64, 0.0f64);
    let mut converged = false;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = 1e-12 * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            converged = true;
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // parabola through x, w, v
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        evals += 1;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum { x: vec![x], f: fx, evaluations: evals, converged }
}

/// Scans `grid` equally spaced points of `[lo, hi]`, then refines around the best
/// one with [`brent`]. Endpoints are candidates, so boundary minima are found.
pub fn scan_then_brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, grid: usize, xtol: f64) -> Minimum {
    let grid = grid.max(3);
    let step = (hi - lo) / (grid - 1) as f64;
    let pts: Vec<f64> = (0..grid).map(|i| if i + 1 == grid { hi } else { lo + step * i as f64 }).collect();
    let vals: Vec<f64> = pts.iter().map(|&x| f(x)).collect();
    let best = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let left = pts[best.saturating_sub(1)];
    let right = pts[(best + 1).min(grid - 1)];
    let mut m = brent(&mut f, left, right, xtol, 200);
    m.evaluations += grid;
    if vals[best] < m.f {
        // Brent never evaluates the bracket endpoints.
        m.x = vec![pts[best]];
        m.f = vals[best];
    }
    m
}

/// Box-projected Nelder–Mead. Terminates when both the simplex diameter (max
/// coordinate distance to the best vertex) and the spread of function values
/// fall below `xtol` and `ftol`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    steps: &[f64],
    bounds: &[(f64, f64)],
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Minimum {
    let dim = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *xi = xi.clamp(lo, hi);
        }
    };
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut s0 = start.to_vec();
    clamp(&mut s0);
    simplex.push(s0.clone());
    for i in 0..dim {
        let mut p = s0.clone();
        p[i] += steps[i];
        if p[i] > bounds[i].1 {
            p[i] = s0[i] - steps[i];
        }
        clamp(&mut p);
        simplex.push(p);
    }
    let mut fs: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();

        let diam = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = fs[dim] - fs[0];
        if diam <= xtol && spread <= ftol * (1.0 + fs[0].abs()) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|p| p[j]).sum::<f64>() / dim as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (c - w)).collect();
            clamp(&mut p);
            p
        };

        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < fs[0] {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[dim] = xe;
                fs[dim] = fe;
            } else {
                simplex[dim] = xr;
                fs[dim] = fr;
            }
            continue;
        }
        if fr < fs[dim - 1] {
            simplex[dim] = xr;
            fs[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < fs[dim] {
            let xc = along(rho * alpha);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fs[dim].min(fr) {
            simplex[dim] = xc;
            fs[dim] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=dim {
            let p: Vec<f64> = simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + sigma * (x - b)).collect();
            fs[i] = eval(&p, &mut evals);
            simplex[i] = p;
        }
    }
    let best = (0..=dim).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), f: fs[best], evaluations: evals, converged }
}
