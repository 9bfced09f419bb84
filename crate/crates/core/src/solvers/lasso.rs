//! Cyclic coordinate descent with covariance updates and warm starts.

use nalgebra::{DMatrix, DVector};

use super::{check_inputs, Estimator, LambdaGrid, RowDiagnostics, SolutionPath};
use crate::design::ModelMatrix;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoOptions {
    /// Convergence threshold on the largest coordinate change in a sweep.
    pub tol: f64,
    /// Maximum full sweeps per lambda.
    pub max_iter: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions {
            tol: 1e-7,
            max_iter: 100_000,
        }
    }
}

#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Largest violation of the lasso optimality conditions for
/// `g = X'(y - X b) / n`.
fn kkt_residual(g: &[f64], beta: &[f64], lambda: f64) -> f64 {
    g.iter()
        .zip(beta)
        .map(|(&gj, &bj)| {
            if bj == 0.0 {
                (gj.abs() - lambda).max(0.0)
            } else {
                (gj - lambda * bj.signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Solves the lasso at every grid value, descending the grid with warm starts.
pub fn lasso_path(m: &ModelMatrix, y: &DVector<f64>, grid: &LambdaGrid, opts: &LassoOptions) -> Result<SolutionPath> {
    check_inputs(m, y)?;
    let x = m.columns();
    let n = m.runs() as f64;
    let p = m.p();
    let gram = m.gram() / n;
    let xty: Vec<f64> = (m.xty(y) / n).iter().copied().collect();
    let diag: Vec<f64> = (0..p).map(|j| gram[(j, j)]).collect();
    let recompute_gradient = |beta: &[f64]| -> Vec<f64> {
        let r = y - x * DVector::from_column_slice(beta);
        (x.tr_mul(&r) / n).iter().copied().collect()
    };

    let mut beta = vec![0.0; p];
    let mut grad = xty.clone();
    let mut coefficients = DMatrix::zeros(grid.len(), p);
    let mut diagnostics = Vec::with_capacity(grid.len());

    for (t, &lambda) in grid.values().iter().enumerate() {
        let mut iterations = 0;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        while iterations < opts.max_iter {
            iterations += 1;
            let mut max_delta: f64 = 0.0;
            for j in 0..p {
                if diag[j] == 0.0 {
                    continue;
                }
                let z = grad[j] + diag[j] * beta[j];
                let new = soft_threshold(z, lambda) / diag[j];
                let delta = new - beta[j];
                if delta != 0.0 {
                    let col = gram.column(j);
                    for (g, &c) in grad.iter_mut().zip(col.iter()) {
                        *g -= c * delta;
                    }
                    beta[j] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            if max_delta < opts.tol {
                grad = recompute_gradient(&beta);
                residual = kkt_residual(&grad, &beta, lambda);
                if residual <= 10.0 * opts.tol {
                    converged = true;
                    break;
                }
            }
        }
        if !converged {
            grad = recompute_gradient(&beta);
            residual = kkt_residual(&grad, &beta, lambda);
        }
        let r = y - x * DVector::from_column_slice(&beta);
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        diagnostics.push(RowDiagnostics {
            iterations,
            residual,
            objective: r.norm_squared() / (2.0 * n) + lambda * l1,
            converged,
        });
        coefficients.row_mut(t).copy_from_slice(&beta);
    }
    Ok(SolutionPath {
        estimator: Estimator::Lasso,
        grid: grid.clone(),
        coefficients,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{hadamard, ModelMatrix};
    use approx::assert_abs_diff_eq;

    fn single_column() -> (ModelMatrix, DVector<f64>) {
        let x = DMatrix::from_column_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]);
        let y = DVector::from_vec(vec![1.5, -1.5, 1.5, -1.5]);
        (ModelMatrix::from_columns("one", x), y)
    }

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(1.5, 0.5), 1.0);
        assert_eq!(soft_threshold(-1.5, 0.5), -1.0);
        assert_eq!(soft_threshold(0.3, 0.5), 0.0);
    }

    #[test]
    fn single_column_closed_form() {
        let (m, y) = single_column();
        let grid = LambdaGrid::custom(vec![2.0, 1.5, 0.5]).unwrap();
        let path = lasso_path(&m, &y, &grid, &LassoOptions::default()).unwrap();
        assert_eq!(path.coefficients[(0, 0)], 0.0);
        assert_eq!(path.coefficients[(1, 0)], 0.0);
        assert_abs_diff_eq!(path.coefficients[(2, 0)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_design_soft_thresholds() {
        let h = hadamard(8).unwrap();
        let x = h.columns(1, 7).into_owned();
        let m = ModelMatrix::from_columns("h8", x.clone());
        let y = DVector::from_vec(vec![3.1, -0.4, 2.2, 0.9, -1.7, 0.05, 1.3, -2.0]);
        let y = &y - DVector::from_element(8, y.mean());
        let grid = LambdaGrid::log_spaced(2.0, 30, 1e-3).unwrap();
        let path = lasso_path(&m, &y, &grid, &LassoOptions::default()).unwrap();
        let c = x.tr_mul(&y) / 8.0;
        for (t, &lam) in grid.values().iter().enumerate() {
            for j in 0..7 {
                assert_abs_diff_eq!(path.coefficients[(t, j)], soft_threshold(c[j], lam), epsilon = 1e-6);
            }
            assert!(path.diagnostics[t].converged);
        }
    }
}
