//! Lawson–Hanson active-set solver for `min ‖Ax − b‖₂` subject to `x ≥ 0`.

use nalgebra::{DMatrix, DVector};

fn least_squares(a: &DMatrix<f64>, cols: &[usize], b: &DVector<f64>) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    sub.svd(true, true)
        .solve(b, 1e-14)
        .expect("SVD computed with both factors")
}

pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    nnls_warm(a, b, &DVector::zeros(a.ncols()))
}

/// Restores feasibility of the passive-set solution by moving from `x` towards it.
fn settle(a: &DMatrix<f64>, b: &DVector<f64>, x: &mut DVector<f64>, passive: &mut [bool], tol: f64) {
    loop {
        let cols: Vec<usize> = (0..x.len()).filter(|&k| passive[k]).collect();
        if cols.is_empty() {
            x.fill(0.0);
            return;
        }
        let s_p = least_squares(a, &cols, b);
        if s_p.iter().all(|&v| v > tol) {
            x.fill(0.0);
            for (k, &col) in cols.iter().enumerate() {
                x[col] = s_p[k];
            }
            return;
        }
        let mut alpha = f64::INFINITY;
        for (k, &col) in cols.iter().enumerate() {
            if s_p[k] <= tol {
                let denom = x[col] - s_p[k];
                if denom > 0.0 {
                    alpha = alpha.min(x[col] / denom);
                } else {
                    alpha = 0.0;
                }
            }
        }
        let alpha = if alpha.is_finite() { alpha } else { 0.0 };
        for (k, &col) in cols.iter().enumerate() {
            x[col] += alpha * (s_p[k] - x[col]);
        }
        for &col in &cols {
            if x[col] <= tol {
                x[col] = 0.0;
                passive[col] = false;
            }
        }
    }
}

/// Lawson–Hanson started from the support of a feasible `x0` (negative entries are dropped).
pub fn nnls_warm(a: &DMatrix<f64>, b: &DVector<f64>, x0: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    assert_eq!(x0.len(), n, "warm start has the wrong length");
    if n == 0 {
        return DVector::zeros(0);
    }
    let tol = 10.0 * f64::EPSILON * a.abs().column_sum().max() * a.nrows().max(n) as f64;
    let mut x = x0.map(|v| if v > tol { v } else { 0.0 });
    let mut passive: Vec<bool> = x.iter().map(|&v| v > 0.0).collect();
    if passive.iter().any(|&p| p) {
        settle(a, b, &mut x, &mut passive, tol);
    }
    let mut w = a.transpose() * (b - a * &x);
    let max_outer = 3 * n + 30;
    for _ in 0..max_outer {
        let cand = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = cand else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;
        settle(a, b, &mut x, &mut passive, tol);
        w = a.transpose() * (b - a * &x);
    }
    x
}
