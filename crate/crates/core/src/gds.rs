//! The Gauss-Dantzig selector: regularized path, hard threshold, OLS refit
//! on each thresholded support, and information-criterion selection.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::ModelMatrix;
use crate::error::{Error, Result};
use crate::simulate::{generate_replicates, ScreeningScenario};
use crate::solvers::{
    dantzig_path, lambda_max, lasso_path, DantzigOptions, Estimator, GridSpec, LassoOptions, SolutionPath,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum GammaRule {
    Fixed(f64),
    /// Threshold at the (known) noise standard deviation.
    Sigma(f64),
    /// A fraction of the largest coefficient magnitude, per lambda.
    DataDriven(f64),
}

impl GammaRule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GammaRule::Fixed(v) | GammaRule::Sigma(v) => v.is_finite() && v > 0.0,
            GammaRule::DataDriven(f) => f > 0.0 && f < 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("gamma", format!("`{self}` out of range")))
        }
    }

    /// The cutoff for one coefficient row.
    pub fn cutoff(&self, row: &[f64]) -> f64 {
        match *self {
            GammaRule::Fixed(v) | GammaRule::Sigma(v) => v,
            GammaRule::DataDriven(f) => f * row.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

impl fmt::Display for GammaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaRule::Fixed(v) => write!(f, "fixed:{v}"),
            GammaRule::Sigma(v) => write!(f, "sigma:{v}"),
            GammaRule::DataDriven(v) => write!(f, "frac:{v}"),
        }
    }
}

impl FromStr for GammaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config("gamma", format!("expected fixed:<v>|sigma:<v>|frac:<f>, got `{s}`"));
        let (kind, v) = s.split_once(':').ok_or_else(bad)?;
        let v: f64 = v.parse().map_err(|_| bad())?;
        let rule = match kind {
            "fixed" => GammaRule::Fixed(v),
            "sigma" => GammaRule::Sigma(v),
            "frac" => GammaRule::DataDriven(v),
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Aicc,
    Bic,
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selection::Aicc => "aicc",
            Selection::Bic => "bic",
        })
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aicc" => Ok(Selection::Aicc),
            "bic" => Ok(Selection::Bic),
            _ => Err(Error::config("ic", format!("expected aicc|bic, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdsConfig {
    /// Resolved against each response's `lambda_max` in the estimator's convention.
    pub grid: GridSpec,
    pub gamma: GammaRule,
    pub selection: Selection,
    pub estimator: Estimator,
}

impl GdsConfig {
    pub fn validate(&self) -> Result<()> {
        self.gamma.validate()
    }
}

/// Supports after hard-thresholding each path row at its cutoff.
pub fn threshold(path: &SolutionPath, gamma: GammaRule) -> Vec<Vec<usize>> {
    let tol = path.zero_tolerance();
    (0..path.len())
        .map(|t| {
            let row: Vec<f64> = path.coefficients.row(t).iter().copied().collect();
            let cut = gamma.cutoff(&row);
            row.iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > tol && v.abs() >= cut)
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refit {
    pub intercept: f64,
    /// Coefficients in support order.
    pub coefficients: Vec<f64>,
    /// Residual sum of squares after flooring.
    pub rss: f64,
    pub ic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefitOutcome {
    Fitted(Refit),
    Skipped(String),
}

/// OLS with an intercept on the support columns, scored by the chosen
/// criterion. `RSS` is floored at `1e-12 * sum(y^2)`.
pub fn ols_refit_ic(m: &ModelMatrix, y: &DVector<f64>, support: &[usize], selection: Selection) -> Result<RefitOutcome> {
    let n = m.runs();
    if y.len() != n {
        return Err(Error::Dimension(format!("response has {} rows, design {n}", y.len())));
    }
    let q = support.len();
    if q + 2 > n {
        return Ok(RefitOutcome::Skipped(format!("support of size {q} leaves no residual degrees of freedom")));
    }
    if selection == Selection::Aicc && n <= q + 3 {
        return Ok(RefitOutcome::Skipped(format!("AICc undefined for q = {q}, n = {n}")));
    }
    let mut z = DMatrix::from_element(n, q + 1, 1.0);
    for (c, &j) in support.iter().enumerate() {
        z.set_column(c + 1, &m.columns().column(j));
    }
    let svd = z.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.rank(1e-10 * smax);
    if rank < q + 1 {
        return Ok(RefitOutcome::Skipped(format!("support {support:?} is rank deficient")));
    }
    let theta = svd.solve(y, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let resid = y - &z * &theta;
    let floor = (1e-12 * y.norm_squared()).max(f64::MIN_POSITIVE);
    let rss = resid.norm_squared().max(floor);
    let nf = n as f64;
    let qf = q as f64;
    let base = nf * (rss / nf).ln();
    let ic = match selection {
        Selection::Bic => base + (qf + 1.0) * nf.ln(),
        Selection::Aicc => base + 2.0 * (qf + 2.0) + 2.0 * (qf + 2.0) * (qf + 3.0) / (nf - qf - 3.0),
    };
    Ok(RefitOutcome::Fitted(Refit {
        intercept: theta[0],
        coefficients: theta.iter().skip(1).copied().collect(),
        rss,
        ic,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GdsFit {
    pub selected: Vec<usize>,
    /// `None` when every candidate was skipped.
    pub chosen_lambda: Option<f64>,
    pub chosen_ic: Option<f64>,
    /// Distinct supports scored.
    pub candidates: usize,
    pub skipped: Vec<String>,
}

/// Picks the IC-minimizing thresholded support along `path`.
pub fn select_from_path(m: &ModelMatrix, y: &DVector<f64>, path: &SolutionPath, gamma: GammaRule, selection: Selection) -> Result<GdsFit> {
    let supports = threshold(path, gamma);
    // smallest lambda at which each distinct support appears; the grid is
    // decreasing so later rows win
    let mut first_seen: Vec<Vec<usize>> = Vec::new();
    let mut lambda_of: HashMap<Vec<usize>, f64> = HashMap::new();
    for (s, &lam) in supports.into_iter().zip(path.grid.values()) {
        if !lambda_of.contains_key(&s) {
            first_seen.push(s.clone());
        }
        lambda_of.insert(s, lam);
    }
    if first_seen.is_empty() {
        first_seen.push(Vec::new());
        lambda_of.insert(Vec::new(), 0.0);
    }
    let mut best: Option<(f64, usize, f64, &Vec<usize>)> = None;
    let mut skipped = Vec::new();
    for s in &first_seen {
        let lam = lambda_of[s];
        match ols_refit_ic(m, y, s, selection)? {
            RefitOutcome::Skipped(why) => skipped.push(why),
            RefitOutcome::Fitted(fit) => {
                let key = (fit.ic, s.len(), lam);
                let better = match best {
                    None => true,
                    Some((ic, len, l, _)) => (key.0, key.1, key.2).partial_cmp(&(ic, len, l)) == Some(std::cmp::Ordering::Less),
                };
                if better {
                    best = Some((key.0, key.1, key.2, s));
                }
            }
        }
    }
    Ok(match best {
        Some((ic, _, lam, s)) => GdsFit {
            selected: s.clone(),
            chosen_lambda: Some(lam),
            chosen_ic: Some(ic),
            candidates: first_seen.len(),
            skipped,
        },
        None => GdsFit {
            selected: Vec::new(),
            chosen_lambda: None,
            chosen_ic: None,
            candidates: first_seen.len(),
            skipped,
        },
    })
}

/// Solves the configured path for `y`.
pub fn solve_path(m: &ModelMatrix, y: &DVector<f64>, estimator: Estimator, grid: GridSpec) -> Result<Option<SolutionPath>> {
    let top = lambda_max(m, y, estimator)?;
    if !(top > 0.0) {
        return Ok(None);
    }
    let grid = grid.build(top)?;
    Ok(Some(match estimator {
        Estimator::Dantzig => dantzig_path(m, y, &grid, &DantzigOptions::default())?,
        Estimator::Lasso => lasso_path(m, y, &grid, &LassoOptions::default())?,
    }))
}

/// Runs all four steps on one response.
pub fn gds_select(m: &ModelMatrix, y: &DVector<f64>, cfg: &GdsConfig) -> Result<GdsFit> {
    cfg.validate()?;
    match solve_path(m, y, cfg.estimator, cfg.grid)? {
        Some(path) => select_from_path(m, y, &path, cfg.gamma, cfg.selection),
        // y has no component along any column: only the empty model
        None => {
            let fit = ols_refit_ic(m, y, &[], cfg.selection)?;
            let (ic, skipped) = match fit {
                RefitOutcome::Fitted(f) => (Some(f.ic), Vec::new()),
                RefitOutcome::Skipped(why) => (None, vec![why]),
            };
            Ok(GdsFit {
                selected: Vec::new(),
                chosen_lambda: ic.map(|_| 0.0),
                chosen_ic: ic,
                candidates: 1,
                skipped,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub power: f64,
    pub type1: f64,
    pub fdr: f64,
}

impl Metrics {
    /// Screening metrics restricted to `universe` (e.g. only main effects).
    pub fn within(selected: &[usize], truth: &[usize], universe: &[usize]) -> Metrics {
        let sel: Vec<usize> = selected.iter().copied().filter(|j| universe.contains(j)).collect();
        let act: Vec<usize> = truth.iter().copied().filter(|j| universe.contains(j)).collect();
        let hits = sel.iter().filter(|j| act.contains(j)).count();
        let false_pos = sel.len() - hits;
        let inactive = universe.len() - act.len();
        Metrics {
            power: if act.is_empty() { 1.0 } else { hits as f64 / act.len() as f64 },
            type1: if inactive == 0 { 0.0 } else { false_pos as f64 / inactive as f64 },
            fdr: false_pos as f64 / sel.len().max(1) as f64,
        }
    }

    pub fn new(selected: &[usize], truth: &[usize], p: usize) -> Metrics {
        let universe: Vec<usize> = (0..p).collect();
        Self::within(selected, truth, &universe)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningOutcome {
    pub selected: Vec<usize>,
    pub power: f64,
    pub type1: f64,
    pub fdr: f64,
    pub chosen_lambda: Option<f64>,
    pub chosen_ic: Option<f64>,
}

impl ScreeningOutcome {
    pub fn new(fit: &GdsFit, truth: &[usize], p: usize) -> Self {
        let Metrics { power, type1, fdr } = Metrics::new(&fit.selected, truth, p);
        ScreeningOutcome {
            selected: fit.selected.clone(),
            power,
            type1,
            fdr,
            chosen_lambda: fit.chosen_lambda,
            chosen_ic: fit.chosen_ic,
        }
    }
}

/// Runs each configuration on every replicate of the scenario. Paths are
/// shared between configurations with the same estimator and grid.
/// `outcomes[c][i]` is configuration `c` on replicate `i`.
pub fn simulate_gds(m: &ModelMatrix, scn: &ScreeningScenario, configs: &[GdsConfig]) -> Result<Vec<Vec<ScreeningOutcome>>> {
    for c in configs {
        c.validate()?;
    }
    let reps = generate_replicates(m, scn)?;
    let p = m.p();
    let per_rep: Vec<Vec<ScreeningOutcome>> = reps
        .par_iter()
        .map(|r| {
            let mut paths: Vec<((Estimator, String), Option<SolutionPath>)> = Vec::new();
            configs
                .iter()
                .map(|cfg| {
                    let key = (cfg.estimator, cfg.grid.to_string());
                    let idx = match paths.iter().position(|(k, _)| *k == key) {
                        Some(i) => i,
                        None => {
                            paths.push((key, solve_path(m, &r.response, cfg.estimator, cfg.grid)?));
                            paths.len() - 1
                        }
                    };
                    let fit = match &paths[idx].1 {
                        Some(path) => select_from_path(m, &r.response, path, cfg.gamma, cfg.selection)?,
                        None => gds_select(m, &r.response, cfg)?,
                    };
                    Ok(ScreeningOutcome::new(&fit, r.support.active(), p))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..configs.len())
        .map(|c| per_rep.iter().map(|row| row[c].clone()).collect())
        .collect())
}

/// Mean of a metric with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    pub fn of(values: impl IntoIterator<Item = f64>) -> MeanSe {
        let v: Vec<f64> = values.into_iter().collect();
        let n = v.len() as f64;
        if v.is_empty() {
            return MeanSe { mean: f64::NAN, se: f64::NAN };
        }
        let mean = v.iter().sum::<f64>() / n;
        let se = if v.len() < 2 {
            0.0
        } else {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        };
        MeanSe { mean, se }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub power: MeanSe,
    pub type1: MeanSe,
    pub fdr: MeanSe,
}

impl Aggregate {
    pub fn of(outcomes: &[ScreeningOutcome]) -> Aggregate {
        Aggregate {
            power: MeanSe::of(outcomes.iter().map(|o| o.power)),
            type1: MeanSe::of(outcomes.iter().map(|o| o.type1)),
            fdr: MeanSe::of(outcomes.iter().map(|o| o.fdr)),
        }
    }

    /// Replicate-paired differences `a - b`, with the stderr of the paired
    /// mean. Both runs must come from the same replicates.
    pub fn paired_difference(a: &[ScreeningOutcome], b: &[ScreeningOutcome]) -> Aggregate {
        assert_eq!(a.len(), b.len(), "paired runs need equal replicate counts");
        let diff = |f: fn(&ScreeningOutcome) -> f64| MeanSe::of(a.iter().zip(b).map(|(x, y)| f(x) - f(y)));
        Aggregate {
            power: diff(|o| o.power),
            type1: diff(|o| o.type1),
            fdr: diff(|o| o.fdr),
        }
    }
}
