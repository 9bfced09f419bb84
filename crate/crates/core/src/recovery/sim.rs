//! Monte Carlo recovery curves for any estimator.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{check_log_grid, CurveKind, RecoveryCurve, Sampling};
use crate::design::ModelMatrix;
use crate::error::{Error, Result};
use crate::simulate::{replicate, ScreeningScenario};
use crate::solvers::{dantzig_path, lasso_path, DantzigOptions, Estimator, LambdaGrid, LassoOptions, SolutionPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The estimated support equals the true one.
    Support,
    /// The estimated signed support equals the true one.
    Sign,
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "support" => Ok(Target::Support),
            "sign" => Ok(Target::Sign),
            _ => Err(Error::config("target", format!("expected support|sign, got `{s}`"))),
        }
    }
}

/// Solver grid for a `log(lambda)` grid given in the lasso convention. The
/// Dantzig constraint `|X'(y - Xb)|_inf <= lambda` is matched at `n lambda`.
fn solver_grid(m: &ModelMatrix, estimator: Estimator, log_lambda: &[f64]) -> Result<LambdaGrid> {
    let scale = match estimator {
        Estimator::Lasso => 1.0,
        Estimator::Dantzig => m.runs() as f64,
    };
    LambdaGrid::custom(log_lambda.iter().map(|l| l.exp() * scale).collect())
}

fn solve(m: &ModelMatrix, y: &nalgebra::DVector<f64>, estimator: Estimator, grid: &LambdaGrid) -> Result<SolutionPath> {
    match estimator {
        Estimator::Lasso => lasso_path(m, y, grid, &LassoOptions::default()),
        Estimator::Dantzig => dantzig_path(m, y, grid, &DantzigOptions::default()),
    }
}

struct Tally {
    hits: Vec<Vec<u32>>,
    nonconverged: usize,
}

/// Runs every replicate, scoring each (replicate, lambda) with `score`,
/// which returns one flag per tracked event. Rows are in increasing-lambda
/// order. Non-converged rows score 0 for every event.
fn tally<F>(m: &ModelMatrix, scn: &ScreeningScenario, estimator: Estimator, log_lambda: &[f64], events: usize, score: F) -> Result<Tally>
where
    F: Fn(&[i8], &[i8]) -> Vec<bool> + Sync,
{
    scn.validate()?;
    check_log_grid(log_lambda)?;
    let grid = solver_grid(m, estimator, log_lambda)?;
    let d = log_lambda.len();
    let p = m.p();
    let per_rep = (0..scn.niter)
        .into_par_iter()
        .map(|i| -> Result<(Vec<Vec<bool>>, usize)> {
            let r = replicate(m, scn, i)?;
            let path = solve(m, &r.response, estimator, &grid)?;
            let truth = r.support.sign_pattern(p);
            let mut flags = vec![vec![false; events]; d];
            let mut bad = 0;
            for row in 0..d {
                // the solver grid is decreasing
                let t = d - 1 - row;
                if !path.diagnostics[row].converged {
                    bad += 1;
                    continue;
                }
                flags[t] = score(&path.signs(row), &truth);
            }
            Ok((flags, bad))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hits = vec![vec![0u32; d]; events];
    let mut nonconverged = 0;
    for (flags, bad) in per_rep {
        nonconverged += bad;
        for (t, f) in flags.iter().enumerate() {
            for (e, &ok) in f.iter().enumerate() {
                hits[e][t] += u32::from(ok);
            }
        }
    }
    Ok(Tally { hits, nonconverged })
}

fn curve(m: &ModelMatrix, scn: &ScreeningScenario, estimator: Estimator, kind: CurveKind, log_lambda: &[f64], hits: &[u32], nonconverged: usize) -> RecoveryCurve {
    let n = scn.niter as f64;
    let prob: Vec<f64> = hits.iter().map(|&h| f64::from(h) / n).collect();
    RecoveryCurve {
        design_id: m.design_id().to_string(),
        estimator,
        kind,
        log_lambda: log_lambda.to_vec(),
        stderr: prob.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect(),
        prob,
        mvn_stderr: None,
        mvn_accuracy: None,
        scenario: if scn.name.is_empty() { scn.description.clone() } else { scn.name.clone() },
        scenario_hash: scn.hash(),
        sampling: Sampling::Drawn { items: scn.niter },
        nonconverged,
    }
}

/// Fraction of simulated responses whose estimate recovers the (signed)
/// support at each `log(lambda)`.
pub fn sim_recovery(m: &ModelMatrix, scn: &ScreeningScenario, estimator: Estimator, target: Target, log_lambda: &[f64]) -> Result<RecoveryCurve> {
    let t = tally(m, scn, estimator, log_lambda, 1, |est, truth| {
        vec![match target {
            Target::Sign => est == truth,
            Target::Support => est.iter().zip(truth).all(|(a, b)| (*a != 0) == (*b != 0)),
        }]
    })?;
    let kind = match target {
        Target::Sign => CurveKind::SimSign,
        Target::Support => CurveKind::SimSupport,
    };
    Ok(curve(m, scn, estimator, kind, log_lambda, &t.hits[0], t.nonconverged))
}

/// Main-effect, interaction and full lasso sign-recovery curves from the
/// same replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitCurves {
    pub me: RecoveryCurve,
    pub tfi: RecoveryCurve,
    pub full: RecoveryCurve,
    /// (replicate, lambda) cells where `me && tfi` disagreed with the full
    /// event; zero unless something is broken.
    pub conjunction_mismatches: usize,
}

pub fn sim_recovery_split(m: &ModelMatrix, scn: &ScreeningScenario, log_lambda: &[f64]) -> Result<SplitCurves> {
    let me = m.main_effect_indices();
    let fi = m.interaction_indices();
    if fi.is_empty() {
        return Err(Error::InvalidScenario("split curves need a model matrix with interactions".into()));
    }
    let restricted = |idx: &[usize], est: &[i8], truth: &[i8]| idx.iter().all(|&j| est[j] == truth[j]);
    let t = tally(m, scn, Estimator::Lasso, log_lambda, 4, |est, truth| {
        let a = restricted(&me, est, truth);
        let b = restricted(&fi, est, truth);
        let full = est == truth;
        vec![a, b, full, (a && b) != full]
    })?;
    Ok(SplitCurves {
        me: curve(m, scn, Estimator::Lasso, CurveKind::SimSignMeOnly, log_lambda, &t.hits[0], t.nonconverged),
        tfi: curve(m, scn, Estimator::Lasso, CurveKind::SimSign2fiOnly, log_lambda, &t.hits[1], t.nonconverged),
        full: curve(m, scn, Estimator::Lasso, CurveKind::SimSign, log_lambda, &t.hits[2], t.nonconverged),
        conjunction_mismatches: t.hits[3].iter().map(|&h| h as usize).sum(),
    })
}
