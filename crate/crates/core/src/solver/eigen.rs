//! Lowest eigenpair of the Dirichlet operator `-D₂ + V` on the interior
//! nodes: Sturm-sequence bisection for the eigenvalue, inverse iteration for
//! the eigenvector.

use crate::error::{CoreError, Result};
use crate::grid::Samples;
use crate::wave::WaveFn;

const MAX_RESTARTS: usize = 3;
const INVERSE_STEPS: usize = 4;

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// `(diag, off)` strictly below `sigma`.
pub(crate) fn sturm_count(diag: &[f64], off: f64, sigma: f64) -> usize {
    let off2 = off * off;
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - sigma } else { d - sigma - off2 / q };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(T + shift I) x = rhs` for the constant-off-diagonal tridiagonal
/// `T = (diag, off)`. Zero pivots are nudged rather than rejected, which is
/// what inverse iteration wants.
pub(crate) fn solve_tridiagonal(diag: &[f64], off: f64, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let floor = f64::EPSILON * diag.iter().fold(off.abs(), |m, d| m.max(d.abs()));
    let guard = |p: f64| {
        if p.abs() < floor {
            if p < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            p
        }
    };
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = guard(diag[0] + shift);
    c[0] = off / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = guard(diag[i] + shift - off * c[i - 1]);
        c[i] = off / pivot;
        d[i] = (rhs[i] - off * d[i - 1]) / pivot;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Smallest eigenvalue of `(diag, off)` by bisection, returned as the
/// bracket `(lo, hi)`.
fn lowest_eigenvalue(diag: &[f64], off: f64) -> (f64, f64) {
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let mut hi = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    (lo, hi)
}

fn tridiagonal_residual(diag: &[f64], off: f64, lambda: f64, x: &[f64]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut r = (diag[i] - lambda) * x[i];
            if i > 0 {
                r += off * x[i - 1];
            }
            if i + 1 < n {
                r += off * x[i + 1];
            }
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

fn unit(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Ground eigenpair of `-u'' + V u = ε u` with `u(±L) = 0`.
///
/// The returned state is normalized in the trapezoid norm and sign-fixed so
/// that `u(0) >= 0`.
pub fn ground_eigenpair(v: &Samples) -> Result<(f64, WaveFn)> {
    let grid = *v.grid();
    let n = grid.len();
    let h = grid.spacing();
    let off = -1.0 / (h * h);
    let diag: Vec<f64> = v.values()[1..n - 1].iter().map(|&vi| 2.0 / (h * h) + vi).collect();
    let m = diag.len();
    if v.values().iter().any(|x| !x.is_finite()) {
        return Err(CoreError::NoConvergence("potential has non-finite samples".into()));
    }

    let (lo, hi) = lowest_eigenvalue(&diag, off);
    let lambda = 0.5 * (lo + hi);
    let scale = diag.iter().fold(off.abs(), |acc, d| acc.max(d.abs()));
    let tol = 1e3 * f64::EPSILON * scale;

    let mut x: Vec<f64> = (0..m)
        .map(|i| (std::f64::consts::PI * (i + 1) as f64 / (m + 1) as f64).sin())
        .collect();
    for attempt in 0..=MAX_RESTARTS {
        let shift = -lo + attempt as f64 * 1e-9 * scale;
        for _ in 0..INVERSE_STEPS {
            x = solve_tridiagonal(&diag, off, shift, &x);
            if x.iter().any(|t| !t.is_finite()) {
                break;
            }
            unit(&mut x);
        }
        if x.iter().all(|t| t.is_finite()) && tridiagonal_residual(&diag, off, lambda, &x) <= tol {
            let mut values = Vec::with_capacity(n);
            values.push(0.0);
            values.extend_from_slice(&x);
            values.push(0.0);
            let c = grid.center();
            let sign = if values[c] < 0.0 || (values[c] == 0.0 && values.iter().sum::<f64>() < 0.0) {
                -1.0
            } else {
                1.0
            };
            values.iter_mut().for_each(|t| *t *= sign);
            let u = WaveFn::normalize(Samples::new(grid, values)?)?;
            return Ok((lambda, u));
        }
        // restart from an alternating-free positive vector
        x = vec![1.0; m];
    }
    Err(CoreError::NoConvergence(format!(
        "inverse iteration did not reach residual {tol:e} after {MAX_RESTARTS} restarts"
    )))
}
