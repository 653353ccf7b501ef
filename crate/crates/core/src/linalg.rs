//! Dense symmetric solves for the Newton steps of the multinomial fit.

use alloc::vec::Vec;

/// Solves `a x = b` for a symmetric positive-definite row-major `n x n`
/// matrix by Cholesky factorization. `None` when `a` is not numerically
/// positive definite.
pub fn cholesky_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut l = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = alloc::vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = alloc::vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Some(x)
}

/// Cholesky solve, retrying with a growing ridge `lambda * I` when the
/// matrix is singular. Returns the solution and the ridge used (0 if none).
pub fn damped_solve(a: &[f64], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    if let Some(x) = cholesky_solve(a, b) {
        return Some((x, 0.0));
    }
    let n = b.len();
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(1e-12, f64::max);
    let mut lambda = scale * 1e-10;
    let mut damped = a.to_vec();
    for _ in 0..24 {
        for i in 0..n {
            damped[i * n + i] = a[i * n + i] + lambda;
        }
        if let Some(x) = cholesky_solve(&damped, b) {
            return Some((x, lambda));
        }
        lambda *= 10.0;
    }
    None
}
