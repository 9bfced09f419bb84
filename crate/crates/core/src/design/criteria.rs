//! `E(s^2)`, `UE(s^2)` and `Var(s+)` style summaries of `S = X'X`.
//!
//! All criteria use the raw `+-1` main-effect columns.

use nalgebra::DMatrix;
use serde::Serialize;

use super::Design;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub id: String,
    pub n: usize,
    pub k: usize,
    /// `None` when some column is unbalanced.
    pub es2: Option<f64>,
    pub ue_s2: f64,
    /// `reference / ue_s2` clamped to `[0, 1]`, when a reference is supplied.
    pub ue_s2_efficiency: Option<f64>,
    pub mean_s: f64,
    pub var_s: f64,
    pub balanced: bool,
}

fn off_diagonals(x: &DMatrix<f64>) -> Vec<f64> {
    let s = x.tr_mul(x);
    let k = s.ncols();
    let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            out.push(s[(i, j)]);
        }
    }
    out
}

/// Average squared off-diagonal of `X'X` over balanced main-effect columns.
pub fn es2(d: &Design) -> Result<f64> {
    if let Some(j) = d.levels().column_iter().position(|c| c.sum() != 0.0) {
        return Err(Error::Unbalanced(d.factor_names()[j].clone()));
    }
    if d.factors() < 2 {
        return Err(Error::InvalidArgument("E(s^2) needs at least 2 factors".into()));
    }
    let s = off_diagonals(d.levels());
    Ok(s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64)
}

/// Average squared off-diagonal of `[1 | X]'[1 | X]`.
pub fn ue_s2(d: &Design) -> f64 {
    let n = d.runs();
    let x = d.levels();
    let mut aug = DMatrix::from_element(n, d.factors() + 1, 1.0);
    aug.columns_mut(1, d.factors()).copy_from(x);
    let s = off_diagonals(&aug);
    s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64
}

/// Mean and population variance of the off-diagonals of `X'X`.
pub fn vars_plus(d: &Design) -> Result<(f64, f64)> {
    if d.factors() < 2 {
        return Err(Error::InvalidArgument("Var(s) needs at least 2 factors".into()));
    }
    let s = off_diagonals(d.levels());
    let m = s.len() as f64;
    let mean = s.iter().sum::<f64>() / m;
    let mean_sq = s.iter().map(|v| v * v).sum::<f64>() / m;
    Ok((mean, (mean_sq - mean * mean).max(0.0)))
}

pub fn criteria_report(d: &Design, ue_s2_reference: Option<f64>) -> Result<CriteriaReport> {
    let balanced = d.is_balanced();
    let es2 = if balanced && d.factors() >= 2 { Some(es2(d)?) } else { None };
    let ue = ue_s2(d);
    let (mean_s, var_s) = if d.factors() >= 2 { vars_plus(d)? } else { (0.0, 0.0) };
    let ue_s2_efficiency = ue_s2_reference.map(|r| {
        if ue <= 0.0 {
            1.0
        } else {
            (r / ue).clamp(0.0, 1.0)
        }
    });
    Ok(CriteriaReport {
        id: d.id().to_string(),
        n: d.runs(),
        k: d.factors(),
        es2,
        ue_s2: ue,
        ue_s2_efficiency,
        mean_s,
        var_s,
        balanced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::plackett_burman;
    use approx::assert_abs_diff_eq;

    fn six_run() -> Design {
        #[rustfmt::skip]
        let cols = [
            [1., 1., 1., -1., -1., -1.],
            [1., 1., -1., 1., -1., -1.],
            [1., -1., 1., -1., 1., -1.],
        ];
        let m = DMatrix::from_fn(6, 3, |i, j| cols[j][i]);
        Design::from_levels("six", m).unwrap()
    }

    #[test]
    fn orthogonal_is_zero() {
        let d = plackett_burman(12).unwrap();
        assert_eq!(es2(&d).unwrap(), 0.0);
        assert_eq!(ue_s2(&d), 0.0);
        assert_eq!(vars_plus(&d).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn six_run_values() {
        let d = six_run();
        assert_abs_diff_eq!(es2(&d).unwrap(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ue_s2(&d), 2.0, epsilon = 1e-12);
        let (m, v) = vars_plus(&d).unwrap();
        assert_abs_diff_eq!(m, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 32.0 / 9.0, epsilon = 1e-12);
    }

    #[test]
    fn unbalanced_single_column() {
        let d = Design::from_levels("u", DMatrix::from_column_slice(4, 1, &[1., 1., 1., -1.])).unwrap();
        assert_abs_diff_eq!(ue_s2(&d), 4.0, epsilon = 1e-12);
        assert!(matches!(es2(&d), Err(Error::Unbalanced(_))));
        assert!(vars_plus(&d).is_err());
    }

    #[test]
    fn constant_off_diagonals() {
        // two columns with s12 = 2
        let d = Design::from_levels(
            "c",
            DMatrix::from_row_slice(4, 2, &[1., 1., 1., 1., -1., -1., -1., 1.]),
        )
        .unwrap();
        let (m, v) = vars_plus(&d).unwrap();
        assert_eq!((m, v), (2.0, 0.0));
    }

    #[test]
    fn report_efficiency() {
        let r = criteria_report(&six_run(), Some(1.0)).unwrap();
        assert_eq!(r.ue_s2_efficiency, Some(0.5));
        assert!(r.balanced);
        assert_eq!(r.es2, Some(4.0));
    }
}
