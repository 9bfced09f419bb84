//! Pathwise lasso and Dantzig selector solvers.
//!
//! Two lambda conventions are in play. The lasso minimizes
//! `|y - X b|^2 / (2n) + lambda |b|_1`, so its path is zero from
//! `|X'y|_inf / n` upwards. The Dantzig selector constrains
//! `|X'(y - X b)|_inf <= lambda`, which is zero from `|X'y|_inf` upwards.

mod dantzig;
mod grid;
mod lasso;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::ModelMatrix;
use crate::error::{Error, Result};

pub use dantzig::{dantzig_path, DantzigOptions};
pub use grid::{GridOrigin, GridScale, GridSpec, LambdaGrid};
pub use lasso::{lasso_path, soft_threshold, LassoOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Lasso,
    Dantzig,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Lasso => "lasso",
            Estimator::Dantzig => "dantzig",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasso" => Ok(Estimator::Lasso),
            "dantzig" => Ok(Estimator::Dantzig),
            other => Err(Error::config("estimator", format!("expected lasso|dantzig, got `{other}`"))),
        }
    }
}

/// Smallest lambda at which the estimator's solution is identically zero.
pub fn lambda_max(m: &ModelMatrix, y: &DVector<f64>, estimator: Estimator) -> Result<f64> {
    if y.len() != m.runs() {
        return Err(Error::Dimension(format!("response has {} rows, design {}", y.len(), m.runs())));
    }
    let top = m.xty(y).amax();
    Ok(match estimator {
        Estimator::Lasso => top / m.runs() as f64,
        Estimator::Dantzig => top,
    })
}

/// Per-lambda solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowDiagnostics {
    pub iterations: usize,
    /// KKT violation (lasso) or the larger of constraint violation and dual
    /// infeasibility (Dantzig).
    pub residual: f64,
    pub objective: f64,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SolutionPath {
    pub estimator: Estimator,
    pub grid: LambdaGrid,
    /// One row per grid value, in grid order.
    pub coefficients: DMatrix<f64>,
    pub diagnostics: Vec<RowDiagnostics>,
}

impl SolutionPath {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn row(&self, t: usize) -> DVector<f64> {
        self.coefficients.row(t).transpose()
    }

    /// Magnitude at or below which a coefficient counts as zero. Coordinate
    /// descent produces exact zeros; simplex basic variables can sit at
    /// roundoff level.
    pub fn zero_tolerance(&self) -> f64 {
        match self.estimator {
            Estimator::Lasso => 0.0,
            Estimator::Dantzig => 1e-8,
        }
    }

    /// Sorted indices of the nonzero coefficients at row `t`.
    pub fn support(&self, t: usize) -> Vec<usize> {
        let tol = self.zero_tolerance();
        self.coefficients
            .row(t)
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > tol)
            .map(|(j, _)| j)
            .collect()
    }

    /// Signs (`-1, 0, +1`) of the coefficients at row `t`.
    pub fn signs(&self, t: usize) -> Vec<i8> {
        let tol = self.zero_tolerance();
        self.coefficients
            .row(t)
            .iter()
            .map(|&v| {
                if v > tol {
                    1
                } else if v < -tol {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    /// Long-format CSV: `estimator,lambda,term,coefficient`.
    pub fn to_csv(&self, term_labels: &[String]) -> String {
        let mut out = String::from("estimator,lambda,term,coefficient\n");
        for (t, lambda) in self.grid.values().iter().enumerate() {
            for (j, label) in term_labels.iter().enumerate() {
                out.push_str(&format!(
                    "{},{:.12e},{},{:.12e}\n",
                    self.estimator, lambda, label, self.coefficients[(t, j)]
                ));
            }
        }
        out
    }
}

pub(crate) fn check_inputs(m: &ModelMatrix, y: &DVector<f64>) -> Result<()> {
    if y.len() != m.runs() {
        return Err(Error::Dimension(format!("response has {} rows, design {}", y.len(), m.runs())));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("response has non-finite entries".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_max_conventions() {
        let x = DMatrix::from_column_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]);
        let m = ModelMatrix::from_columns("one", x);
        let y = DVector::from_vec(vec![1.5, -1.5, 1.5, -1.5]);
        assert_eq!(lambda_max(&m, &y, Estimator::Lasso).unwrap(), 1.5);
        assert_eq!(lambda_max(&m, &y, Estimator::Dantzig).unwrap(), 6.0);
        let orth = DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(lambda_max(&m, &orth, Estimator::Lasso).unwrap(), 0.0);
    }

    #[test]
    fn path_csv_is_long_format() {
        let grid = LambdaGrid::custom(vec![2.0, 1.0]).unwrap();
        let path = SolutionPath {
            estimator: Estimator::Lasso,
            grid,
            coefficients: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.5, -0.25]),
            diagnostics: vec![],
        };
        let csv = path.to_csv(&["A".into(), "B".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "estimator,lambda,term,coefficient");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("lasso,1.000000000000e0,B,-2.5"));
    }
}
