//! Convex-hull feasibility by non-negative least squares.
//!
//! `target ∈ conv(points)` is decided by solving
//! `min ‖Σ wₖ pointₖ − target‖² + (Σ wₖ − 1)²` over `w ≥ 0` with the
//! Lawson–Hanson active-set method and comparing the residual norm to a threshold.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct HullFit {
    pub weights: Vec<f64>,
    pub residual: f64,
}

/// Best convex-combination fit of `target` by `points` (all of equal length).
pub fn hull_fit(points: &[Vec<f64>], target: &[f64]) -> HullFit {
    let n = points.len();
    let m = target.len() + 1;
    let a = DMatrix::from_fn(m, n, |i, j| if i < target.len() { points[j][i] } else { 1.0 });
    let b = DVector::from_fn(m, |i, _| if i < target.len() { target[i] } else { 1.0 });
    let w = nnls(&a, &b);
    let residual = (&a * &w - &b).norm();
    HullFit {
        weights: w.iter().copied().collect(),
        residual,
    }
}

pub fn in_hull(points: &[Vec<f64>], target: &[f64], tol: f64) -> bool {
    !points.is_empty() && hull_fit(points, target).residual <= tol
}

/// Lawson–Hanson NNLS: `min ‖Ax − b‖` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let grad_tol = 1e-13 * scale * scale * (a.nrows().max(n) as f64);
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let grad = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]));
        let Some(j) = candidate else { break };
        if grad[j] <= grad_tol {
            break;
        }
        passive[j] = true;

        for _ in 0..=n {
            let z = solve_passive(a, b, &passive);
            if (0..n).filter(|&i| passive[i]).all(|i| z[i] > 0.0) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&i| passive[i] && z[i] <= 0.0)
                .map(|i| x[i] / (x[i] - z[i]))
                .fold(f64::INFINITY, f64::min);
            x += (&z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    x
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let sub = DMatrix::from_fn(a.nrows(), cols.len(), |i, k| a[(i, cols[k])]);
    let sol = sub
        .svd(true, true)
        .solve(b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    let mut z = DVector::zeros(passive.len());
    for (k, &c) in cols.iter().enumerate() {
        z[c] = sol[k];
    }
    z
}
