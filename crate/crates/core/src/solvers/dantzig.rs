//! Dantzig selector by a dense tableau simplex.
//!
//! The linear program in standard form is
//!
//! ```text
//! min 1'(b+ + b-)
//!  G b+ - G b- + s1 = c + lambda
//! -G b+ + G b- + s2 = lambda - c,      b+, b-, s1, s2 >= 0
//! ```
//!
//! with `G = X'X` and `c = X'y`. The all-slack basis is dual feasible for
//! every lambda (its reduced costs are the unit objective weights), and it is
//! primal feasible from `|c|_inf` upwards. Lowering lambda only moves the
//! right-hand side, so the previous optimal basis stays dual feasible and is
//! re-optimized by dual simplex pivots. Dantzig pricing is used until ten
//! consecutive degenerate pivots, then Bland's rule; ties go to the lowest
//! index.

use nalgebra::{DMatrix, DVector};

use super::{check_inputs, Estimator, LambdaGrid, RowDiagnostics, SolutionPath};
use crate::design::ModelMatrix;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DantzigOptions {
    /// Constraint and dual feasibility tolerance.
    pub tol: f64,
    pub pivot_tol: f64,
    /// Consecutive zero-progress pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
    /// Pivots between refactorizations of the basis.
    pub refactor_every: usize,
}

impl Default for DantzigOptions {
    fn default() -> Self {
        DantzigOptions {
            tol: 1e-8,
            pivot_tol: 1e-9,
            degenerate_limit: 10,
            refactor_every: 64,
        }
    }
}

struct Tableau {
    p: usize,
    /// `B^-1 A`, `2p x 4p`.
    t: DMatrix<f64>,
    /// Basic variable for each row.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Reduced costs.
    d: Vec<f64>,
    /// Basic values.
    xb: Vec<f64>,
    a: DMatrix<f64>,
    c: DVector<f64>,
    pivots_since_refactor: usize,
}

impl Tableau {
    fn new(gram: &DMatrix<f64>, c: DVector<f64>) -> Self {
        let p = gram.nrows();
        let (m, cols) = (2 * p, 4 * p);
        let mut a = DMatrix::zeros(m, cols);
        for i in 0..p {
            for j in 0..p {
                let g = gram[(i, j)];
                a[(i, j)] = g;
                a[(i, p + j)] = -g;
                a[(p + i, j)] = -g;
                a[(p + i, p + j)] = g;
            }
            a[(i, 2 * p + i)] = 1.0;
            a[(p + i, 3 * p + i)] = 1.0;
        }
        let basis: Vec<usize> = (2 * p..4 * p).collect();
        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut d = vec![0.0; cols];
        d[..2 * p].iter_mut().for_each(|v| *v = 1.0);
        Tableau {
            p,
            t: a.clone(),
            basis,
            is_basic,
            d,
            xb: vec![0.0; m],
            a,
            c,
            pivots_since_refactor: 0,
        }
    }

    fn cost(&self, j: usize) -> f64 {
        if j < 2 * self.p {
            1.0
        } else {
            0.0
        }
    }

    fn rhs(&self, lambda: f64) -> DVector<f64> {
        let p = self.p;
        DVector::from_fn(2 * p, |i, _| if i < p { self.c[i] + lambda } else { lambda - self.c[i - p] })
    }

    /// Basic values from the slack columns of the tableau, which hold `B^-1`.
    fn update_rhs(&mut self, lambda: f64) {
        let b = self.rhs(lambda);
        let binv = self.t.columns(2 * self.p, 2 * self.p);
        self.xb = (binv * b).iter().copied().collect();
    }

    /// Rebuilds `B^-1 A` and the reduced costs from the basis.
    fn refactor(&mut self, lambda: f64) -> bool {
        let bmat = self.a.select_columns(&self.basis);
        let Some(binv) = bmat.lu().try_inverse() else {
            return false;
        };
        self.t = &binv * &self.a;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost(j)).collect();
        for j in 0..self.t.ncols() {
            let z: f64 = (0..self.basis.len()).map(|r| cb[r] * self.t[(r, j)]).sum();
            self.d[j] = if self.is_basic[j] { 0.0 } else { self.cost(j) - z };
        }
        self.update_rhs(lambda);
        self.pivots_since_refactor = 0;
        true
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let cols = self.t.ncols();
        let piv = self.t[(r, e)];
        for j in 0..cols {
            self.t[(r, j)] /= piv;
        }
        self.xb[r] /= piv;
        let prow: Vec<f64> = self.t.row(r).iter().copied().collect();
        for i in 0..self.t.nrows() {
            if i == r {
                continue;
            }
            let f = self.t[(i, e)];
            if f != 0.0 {
                for (j, pj) in prow.iter().enumerate() {
                    self.t[(i, j)] -= f * pj;
                }
                self.xb[i] -= f * self.xb[r];
            }
        }
        let f = self.d[e];
        if f != 0.0 {
            for (dj, pj) in self.d.iter_mut().zip(&prow) {
                *dj -= f * pj;
            }
        }
        self.d[e] = 0.0;
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[e] = true;
        self.basis[r] = e;
        self.pivots_since_refactor += 1;
    }

    /// Dual simplex from the current (dual feasible) basis. Returns the pivot
    /// count and whether an optimal basis was reached.
    fn reoptimize(&mut self, lambda: f64, opts: &DantzigOptions) -> (usize, bool) {
        let max_pivots = 50 * self.t.nrows() + 100;
        let mut pivots = 0;
        let mut degenerate_run = 0;
        let feas_tol = opts.tol * 0.1;
        loop {
            if self.pivots_since_refactor >= opts.refactor_every && !self.refactor(lambda) {
                return (pivots, false);
            }
            let bland = degenerate_run >= opts.degenerate_limit;
            let leaving = if bland {
                (0..self.xb.len())
                    .filter(|&r| self.xb[r] < -feas_tol)
                    .min_by_key(|&r| self.basis[r])
            } else {
                let mut best: Option<usize> = None;
                for r in 0..self.xb.len() {
                    if self.xb[r] < -feas_tol && best.is_none_or(|b| self.xb[r] < self.xb[b]) {
                        best = Some(r);
                    }
                }
                best
            };
            let Some(r) = leaving else {
                return (pivots, true);
            };
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.t.ncols() {
                if self.is_basic[j] {
                    continue;
                }
                let a = self.t[(r, j)];
                if a < -opts.pivot_tol {
                    let ratio = self.d[j].max(0.0) / -a;
                    let better = match entering {
                        None => true,
                        Some((_, best)) => ratio < best - 1e-12 * (1.0 + best),
                    };
                    if better {
                        entering = Some((j, ratio));
                    }
                }
            }
            let Some((e, ratio)) = entering else {
                return (pivots, false);
            };
            if ratio * -self.xb[r] <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, e);
            pivots += 1;
            if pivots > max_pivots {
                return (pivots, false);
            }
        }
    }

    fn beta(&self) -> Vec<f64> {
        let p = self.p;
        let mut beta = vec![0.0; p];
        for (r, &j) in self.basis.iter().enumerate() {
            let v = self.xb[r].max(0.0);
            if j < p {
                beta[j] += v;
            } else if j < 2 * p {
                beta[j - p] -= v;
            }
        }
        beta
    }

    fn dual_infeasibility(&self) -> f64 {
        self.d.iter().fold(0.0f64, |acc, &v| acc.max(-v))
    }
}

/// `max(|c - G b|_inf - lambda, 0)`.
fn constraint_violation(gram: &DMatrix<f64>, c: &DVector<f64>, beta: &[f64], lambda: f64) -> f64 {
    let r = c - gram * DVector::from_column_slice(beta);
    (r.amax() - lambda).max(0.0)
}

/// Solves the Dantzig selector at every grid value (Dantzig convention),
/// descending the grid from the all-slack basis.
pub fn dantzig_path(m: &ModelMatrix, y: &DVector<f64>, grid: &LambdaGrid, opts: &DantzigOptions) -> Result<SolutionPath> {
    check_inputs(m, y)?;
    let p = m.p();
    let gram = m.gram();
    let c = m.xty(y);
    let mut tab = Tableau::new(&gram, c.clone());
    let mut coefficients = DMatrix::zeros(grid.len(), p);
    let mut diagnostics = Vec::with_capacity(grid.len());

    for (t, &lambda) in grid.values().iter().enumerate() {
        tab.update_rhs(lambda);
        let (mut iterations, mut ok) = tab.reoptimize(lambda, opts);
        let mut beta = tab.beta();
        let mut residual = constraint_violation(&gram, &c, &beta, lambda).max(tab.dual_infeasibility());
        if !ok || residual > opts.tol {
            // roundoff or a stall: refactor and try again
            if tab.refactor(lambda) {
                let (more, ok2) = tab.reoptimize(lambda, opts);
                iterations += more;
                ok = ok2;
            } else {
                tab = Tableau::new(&gram, c.clone());
                tab.update_rhs(lambda);
                let (more, ok2) = tab.reoptimize(lambda, opts);
                iterations += more;
                ok = ok2;
            }
            beta = tab.beta();
            residual = constraint_violation(&gram, &c, &beta, lambda).max(tab.dual_infeasibility());
        }
        let objective = beta.iter().map(|b| b.abs()).sum();
        diagnostics.push(RowDiagnostics {
            iterations,
            residual,
            objective,
            converged: ok && residual <= opts.tol,
        });
        coefficients.row_mut(t).copy_from_slice(&beta);
    }
    Ok(SolutionPath {
        estimator: Estimator::Dantzig,
        grid: grid.clone(),
        coefficients,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::hadamard;
    use crate::solvers::soft_threshold;
    use approx::assert_abs_diff_eq;

    fn centered(v: Vec<f64>) -> DVector<f64> {
        let y = DVector::from_vec(v);
        let mean = y.mean();
        y.add_scalar(-mean)
    }

    #[test]
    fn zero_above_lambda_max() {
        let h = hadamard(8).unwrap();
        let m = ModelMatrix::from_columns("h", h.columns(1, 3).into_owned());
        let y = centered(vec![1.0, 2.0, -0.5, 0.3, 0.0, -1.2, 2.2, 0.7]);
        let top = m.xty(&y).amax();
        let grid = LambdaGrid::custom(vec![top * 2.0, top]).unwrap();
        let path = dantzig_path(&m, &y, &grid, &DantzigOptions::default()).unwrap();
        assert!(path.coefficients.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn orthogonal_columns_soft_threshold() {
        let h = hadamard(8).unwrap();
        let x = h.columns(1, 3).into_owned();
        let m = ModelMatrix::from_columns("h", x.clone());
        let y = centered(vec![3.0, -2.0, 1.4, 0.3, -0.8, -1.2, 2.2, 0.7]);
        let c = x.tr_mul(&y);
        let top = c.amax();
        let grid = LambdaGrid::log_spaced(top, 40, 1e-3).unwrap();
        let path = dantzig_path(&m, &y, &grid, &DantzigOptions::default()).unwrap();
        for (t, &lam) in grid.values().iter().enumerate() {
            for j in 0..3 {
                assert_abs_diff_eq!(path.coefficients[(t, j)], soft_threshold(c[j] / 8.0, lam / 8.0), epsilon = 1e-9);
            }
            assert!(path.diagnostics[t].converged, "row {t}: {:?}", path.diagnostics[t]);
        }
    }
}
