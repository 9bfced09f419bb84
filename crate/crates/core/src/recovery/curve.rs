use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::solvers::Estimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    ExactSign,
    SimSign,
    SimSupport,
    SimSignMeOnly,
    SimSign2fiOnly,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::ExactSign => "exact_sign",
            CurveKind::SimSign => "sim_sign",
            CurveKind::SimSupport => "sim_support",
            CurveKind::SimSignMeOnly => "sim_sign_me_only",
            CurveKind::SimSign2fiOnly => "sim_sign_2fi_only",
        })
    }
}

/// How the items behind an average were chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Sampling {
    /// Every (support, sign) item was evaluated.
    Enumerated { items: usize },
    /// A uniform sample without replacement from `population` items.
    Sampled { items: usize, population: String },
    /// Independent draws of support and magnitudes (or simulated replicates).
    Drawn { items: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryCurve {
    pub design_id: String,
    pub estimator: Estimator,
    pub kind: CurveKind,
    /// Strictly increasing.
    pub log_lambda: Vec<f64>,
    pub prob: Vec<f64>,
    /// Sampling standard error per point.
    pub stderr: Vec<f64>,
    /// Numerical integration error per point, for exact curves.
    pub mvn_stderr: Option<Vec<f64>>,
    pub mvn_accuracy: Option<f64>,
    pub scenario: String,
    pub scenario_hash: String,
    pub sampling: Sampling,
    /// Replicate rows whose solver did not converge (counted as failures).
    pub nonconverged: usize,
}

impl RecoveryCurve {
    pub const CSV_HEADER: &'static str = "design_id,estimator,kind,log_lambda,prob,stderr,scenario_hash";

    pub fn len(&self) -> usize {
        self.log_lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_lambda.is_empty()
    }

    /// CSV body rows (no header).
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.10e},{:.10e},{}\n",
                self.design_id, self.estimator, self.kind, self.log_lambda[i], self.prob[i], self.stderr[i], self.scenario_hash
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::CSV_HEADER, self.csv_rows())
    }

    /// Larger of the sampling and integration errors at point `i`, combined
    /// in quadrature.
    pub fn total_stderr(&self, i: usize) -> f64 {
        let mvn = self.mvn_stderr.as_ref().map_or(0.0, |v| v[i]);
        self.stderr[i].hypot(mvn)
    }
}

/// `d` evenly spaced values on `[lo, hi]`, increasing.
pub fn log_lambda_grid(lo: f64, hi: f64, d: usize) -> Result<Vec<f64>> {
    if d < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::config("grid", format!("need d >= 2 and lo < hi, got d = {d}, [{lo}, {hi}]")));
    }
    Ok((0..d).map(|i| lo + (hi - lo) * i as f64 / (d - 1) as f64).collect())
}

/// 50 points on `log(lambda)` in `[-4, 2]`.
pub fn default_log_grid() -> Vec<f64> {
    log_lambda_grid(-4.0, 2.0, 50).expect("valid default grid")
}

pub(crate) fn check_log_grid(log_lambda: &[f64]) -> Result<()> {
    if log_lambda.is_empty() {
        return Err(Error::config("grid", "log-lambda grid is empty"));
    }
    if log_lambda.iter().any(|v| !v.is_finite()) || log_lambda.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("grid", "log-lambda grid must be finite and strictly increasing"));
    }
    Ok(())
}

/// 16 hex digits of the SHA-256 of a descriptor's compact JSON.
pub fn descriptor_hash<T: Serialize>(descriptor: &T) -> String {
    let json = serde_json::to_vec(descriptor).expect("descriptor serializes");
    hex::encode(Sha256::digest(&json))[..16].to_string()
}
