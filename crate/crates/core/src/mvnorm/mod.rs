//! Multivariate normal rectangle probabilities.
//!
//! Exact closed forms are used whenever the covariance separates into
//! independent coordinates. Correlated blocks go through the Genz
//! separation-of-variables transform: a Cholesky factorization with variable
//! reordering (smallest conditional interval mass first), followed by a
//! randomized Richtmyer lattice rule with a tent periodization, antithetic
//! pairs and independent random shifts. The standard error is taken from the
//! spread of the shift means.
//!
//! Rank-deficient covariances are integrated in their range space: a
//! coordinate whose conditional variance vanishes is a fixed linear function
//! of earlier variables, so its bounds are folded into the bounds of the last
//! variable it depends on. A coordinate that is constant outright either
//! satisfies its bounds (and drops out) or makes the probability zero.

mod normal;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, substream, Domain};

pub use normal::{normal_cdf, normal_interval, normal_pdf, normal_quantile};
use normal::truncated_mean;

pub const DEFAULT_ACCURACY: f64 = 5e-4;

/// `P[lower <= Z <= upper]` for `Z ~ N(mean, covariance)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRegion {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl GaussianRegion {
    /// Validates dimensions, symmetry and bounds. Zero-width intervals
    /// (`lower == upper`) are accepted.
    pub fn new(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        lower: DVector<f64>,
        upper: DVector<f64>,
    ) -> Result<Self> {
        let m = mean.len();
        if m == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        if covariance.shape() != (m, m) || lower.len() != m || upper.len() != m {
            return Err(Error::Dimension(format!(
                "mean {m}, covariance {:?}, bounds {}/{}",
                covariance.shape(),
                lower.len(),
                upper.len()
            )));
        }
        let scale = covariance.amax().max(f64::MIN_POSITIVE);
        for i in 0..m {
            if !(covariance[(i, i)] >= 0.0) {
                return Err(Error::InvalidRegion(format!("negative variance at {i}")));
            }
            if !(lower[i] <= upper[i]) {
                return Err(Error::InvalidRegion(format!(
                    "lower bound {} exceeds upper bound {} at {i}",
                    lower[i], upper[i]
                )));
            }
            if !mean[i].is_finite() {
                return Err(Error::InvalidRegion(format!("non-finite mean at {i}")));
            }
            for j in (i + 1)..m {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidRegion(format!("covariance not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(GaussianRegion {
            mean,
            covariance,
            lower,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    /// The same region with coordinates reordered as `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let m = self.dim();
        GaussianRegion {
            mean: DVector::from_fn(m, |i, _| self.mean[perm[i]]),
            covariance: DMatrix::from_fn(m, m, |i, j| self.covariance[(perm[i], perm[j])]),
            lower: DVector::from_fn(m, |i, _| self.lower[perm[i]]),
            upper: DVector::from_fn(m, |i, _| self.upper[perm[i]]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm1d,
    ClosedFormIndependent,
    Qmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    /// Estimated integration error; zero for closed forms.
    pub stderr: f64,
    pub method: Method,
    /// Lattice points per shift in the final QMC round (0 if none).
    pub points: usize,
    /// The point budget ran out before `stderr <= accuracy`.
    pub capped: bool,
}

impl ProbabilityEstimate {
    fn exact(value: f64, method: Method) -> Self {
        ProbabilityEstimate {
            value: value.clamp(0.0, 1.0),
            stderr: 0.0,
            method,
            points: 0,
            capped: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnOptions {
    pub accuracy: f64,
    pub shifts: usize,
    pub initial_points: usize,
    pub max_points: usize,
}

impl Default for MvnOptions {
    fn default() -> Self {
        MvnOptions {
            accuracy: DEFAULT_ACCURACY,
            shifts: 12,
            initial_points: 1 << 6,
            max_points: 1 << 20,
        }
    }
}

impl MvnOptions {
    pub fn with_accuracy(accuracy: f64) -> Self {
        MvnOptions {
            accuracy,
            ..Default::default()
        }
    }
}

/// Rectangle probability with default options at the given accuracy.
pub fn mvn_rectangle(region: &GaussianRegion, accuracy: f64, seed: u64) -> Result<ProbabilityEstimate> {
    mvn_rectangle_with(region, &MvnOptions::with_accuracy(accuracy), seed)
}

/// `P[sign_i * Z_i > 0 for all i]`.
pub fn mvn_orthant_signed(
    mean: &DVector<f64>,
    covariance: &DMatrix<f64>,
    signs: &[f64],
    accuracy: f64,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    let m = mean.len();
    if signs.len() != m {
        return Err(Error::Dimension(format!("{} signs for dimension {m}", signs.len())));
    }
    if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::InvalidArgument("signs must be +-1".into()));
    }
    if covariance.shape() != (m, m) {
        return Err(Error::Dimension(format!("covariance {:?} for dimension {m}", covariance.shape())));
    }
    let flipped_mean = DVector::from_fn(m, |i, _| signs[i] * mean[i]);
    let flipped_cov = DMatrix::from_fn(m, m, |i, j| signs[i] * signs[j] * covariance[(i, j)]);
    let region = GaussianRegion::new(
        flipped_mean,
        flipped_cov,
        DVector::zeros(m),
        DVector::from_element(m, f64::INFINITY),
    )?;
    mvn_rectangle(&region, accuracy, seed)
}

pub fn mvn_rectangle_with(region: &GaussianRegion, opts: &MvnOptions, seed: u64) -> Result<ProbabilityEstimate> {
    if !(opts.accuracy > 0.0) {
        return Err(Error::InvalidArgument(format!("accuracy must be positive, got {}", opts.accuracy)));
    }
    if opts.shifts < 2 {
        return Err(Error::InvalidArgument("need at least 2 QMC shifts".into()));
    }
    let m = region.dim();
    let cov = &region.covariance;
    check_psd(cov)?;

    let a = &region.lower - &region.mean;
    let b = &region.upper - &region.mean;
    let max_diag = (0..m).map(|i| cov[(i, i)]).fold(0.0, f64::max);
    let var_tol = 1e-10 * max_diag;

    let comps = components(cov);
    let all_scalar = comps.iter().all(|c| c.len() == 1);
    let method = match (m, all_scalar) {
        (1, _) => Method::ClosedForm1d,
        (_, true) => Method::ClosedFormIndependent,
        _ => Method::Qmc,
    };

    let mut parts: Vec<(f64, f64)> = Vec::with_capacity(comps.len());
    let mut points = 0;
    let mut capped = false;
    for (ci, comp) in comps.iter().enumerate() {
        let (value, se) = if comp.len() == 1 {
            let i = comp[0];
            let v = cov[(i, i)];
            let p = if v <= var_tol {
                if a[i] <= 0.0 && 0.0 <= b[i] {
                    1.0
                } else {
                    0.0
                }
            } else {
                let s = v.sqrt();
                normal_interval(a[i] / s, b[i] / s)
            };
            (p, 0.0)
        } else {
            let sub_cov = DMatrix::from_fn(comp.len(), comp.len(), |r, c| cov[(comp[r], comp[c])]);
            let sub_a: Vec<f64> = comp.iter().map(|&i| a[i]).collect();
            let sub_b: Vec<f64> = comp.iter().map(|&i| b[i]).collect();
            match Separated::prepare(&sub_cov, &sub_a, &sub_b, var_tol) {
                None => (0.0, 0.0),
                Some(sep) => {
                    let est = sep.integrate(opts, derive_seed(seed, ci as u64));
                    points = points.max(est.points);
                    capped |= est.capped;
                    (est.value, est.stderr)
                }
            }
        };
        if value == 0.0 && se == 0.0 {
            return Ok(ProbabilityEstimate {
                points,
                capped,
                ..ProbabilityEstimate::exact(0.0, method)
            });
        }
        parts.push((value, se));
    }
    let value: f64 = parts.iter().map(|p| p.0).product();
    let var: f64 = (0..parts.len())
        .map(|i| {
            let others: f64 = parts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.0).product();
            (parts[i].1 * others).powi(2)
        })
        .sum();
    Ok(ProbabilityEstimate {
        value: value.clamp(0.0, 1.0),
        stderr: var.sqrt(),
        method,
        points,
        capped,
    })
}

fn check_psd(cov: &DMatrix<f64>) -> Result<()> {
    let m = cov.nrows();
    let trace = cov.trace();
    let is_diagonal = (0..m).all(|i| (0..m).all(|j| i == j || cov[(i, j)] == 0.0));
    if is_diagonal {
        return Ok(());
    }
    let eig = SymmetricEigen::new(cov.clone());
    let min = eig.eigenvalues.min();
    if min < -1e-8 * trace / m as f64 {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

/// Connected components of the correlation graph, each sorted, ordered by
/// smallest member.
fn components(cov: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let m = cov.nrows();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in (i + 1)..m {
            let tol = 1e-12 * (cov[(i, i)] * cov[(j, j)]).sqrt();
            if cov[(i, j)].abs() > tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        match root_of_group.iter().position(|&g| g == r) {
            Some(g) => groups[g].push(i),
            None => {
                root_of_group.push(r);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// One linear constraint `lo <= coef . w[..col] + pivot * w[col] <= hi`.
#[derive(Debug, Clone)]
struct Constraint {
    coef: Vec<f64>,
    pivot: f64,
    lo: f64,
    hi: f64,
}

/// The separated integrand: column `i` carries every constraint whose last
/// nonzero Cholesky coefficient sits in column `i`.
#[derive(Debug, Clone)]
struct Separated {
    columns: Vec<Vec<Constraint>>,
}

impl Separated {
    /// Returns `None` when a deterministic coordinate violates its bounds.
    fn prepare(cov: &DMatrix<f64>, a: &[f64], b: &[f64], var_tol: f64) -> Option<Separated> {
        let d = cov.nrows();
        let mut l = DMatrix::<f64>::zeros(d, d);
        let mut y: Vec<f64> = Vec::with_capacity(d);
        let mut pivots: Vec<usize> = Vec::with_capacity(d);
        let mut dependent: Vec<usize> = Vec::new();
        let mut remaining: Vec<usize> = (0..d).collect();

        while !remaining.is_empty() {
            let i = pivots.len();
            let mut best: Option<(usize, f64, f64)> = None;
            let mut still: Vec<usize> = Vec::with_capacity(remaining.len());
            for &j in &remaining {
                let partial: f64 = (0..i).map(|k| l[(j, k)] * l[(j, k)]).sum();
                let v = cov[(j, j)] - partial;
                if v <= var_tol {
                    dependent.push(j);
                    continue;
                }
                still.push(j);
                let s = v.sqrt();
                let mu: f64 = (0..i).map(|k| l[(j, k)] * y[k]).sum();
                let mass = normal_interval((a[j] - mu) / s, (b[j] - mu) / s);
                if best.is_none_or(|(_, bm, _)| mass < bm) {
                    best = Some((j, mass, s));
                }
            }
            let Some((jp, _, s)) = best else { break };
            remaining = still.into_iter().filter(|&j| j != jp).collect();
            l[(jp, i)] = s;
            for &j in &remaining {
                let partial: f64 = (0..i).map(|k| l[(j, k)] * l[(jp, k)]).sum();
                l[(j, i)] = (cov[(j, jp)] - partial) / s;
            }
            let mu: f64 = (0..i).map(|k| l[(jp, k)] * y[k]).sum();
            y.push(truncated_mean((a[jp] - mu) / s, (b[jp] - mu) / s));
            pivots.push(jp);
        }

        let rank = pivots.len();
        let mut columns: Vec<Vec<Constraint>> = vec![Vec::new(); rank];
        for (i, &j) in pivots.iter().enumerate() {
            columns[i].push(Constraint {
                coef: (0..i).map(|k| l[(j, k)]).collect(),
                pivot: l[(j, i)],
                lo: a[j],
                hi: b[j],
            });
        }
        // 1e-8 * sqrt(max diagonal)
        let coef_tol = 1e-3 * var_tol.sqrt();
        for &j in &dependent {
            match (0..rank).rev().find(|&c| l[(j, c)].abs() > coef_tol) {
                None => {
                    if !(a[j] <= 0.0 && 0.0 <= b[j]) {
                        return None;
                    }
                }
                Some(c) => columns[c].push(Constraint {
                    coef: (0..c).map(|k| l[(j, k)]).collect(),
                    pivot: l[(j, c)],
                    lo: a[j],
                    hi: b[j],
                }),
            }
        }
        Some(Separated { columns })
    }

    fn rank(&self) -> usize {
        self.columns.len()
    }

    /// Integrand value at `u` (length `rank - 1`); `w` is scratch space.
    fn eval(&self, u: &[f64], w: &mut [f64]) -> f64 {
        let rank = self.rank();
        let mut prod = 1.0;
        for i in 0..rank {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for c in &self.columns[i] {
                let t: f64 = c.coef.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
                let (l, h) = ((c.lo - t) / c.pivot, (c.hi - t) / c.pivot);
                let (l, h) = if c.pivot > 0.0 { (l, h) } else { (h, l) };
                lo = lo.max(l);
                hi = hi.min(h);
            }
            if !(lo < hi) {
                return 0.0;
            }
            // work in whichever tail keeps the cdf values small
            let (mass, base, upper_tail) = if lo > 0.0 {
                let ql = normal_cdf(-lo);
                (ql - normal_cdf(-hi), ql, true)
            } else {
                let pl = normal_cdf(lo);
                (normal_cdf(hi) - pl, pl, false)
            };
            if !(mass > 0.0) {
                return 0.0;
            }
            prod *= mass;
            if prod == 0.0 {
                return 0.0;
            }
            if i + 1 < rank {
                w[i] = if upper_tail {
                    -normal_quantile(base - u[i] * mass)
                } else {
                    normal_quantile(base + u[i] * mass)
                };
                if !w[i].is_finite() {
                    w[i] = if w[i] > 0.0 { hi.min(38.0) } else { lo.max(-38.0) };
                }
            }
        }
        prod
    }

    fn integrate(&self, opts: &MvnOptions, seed: u64) -> ProbabilityEstimate {
        let rank = self.rank();
        if rank == 0 {
            return ProbabilityEstimate::exact(1.0, Method::Qmc);
        }
        let dim = rank - 1;
        if dim == 0 {
            let mut w = [0.0];
            return ProbabilityEstimate::exact(self.eval(&[], &mut w), Method::Qmc);
        }
        let generator = richtmyer(dim);
        let mut points = opts.initial_points.max(16);
        let mut round: u64 = 0;
        loop {
            let shift_means: Vec<f64> = (0..opts.shifts)
                .into_par_iter()
                .map(|s| {
                    let idx = round * opts.shifts as u64 + s as u64;
                    let mut rng = substream(seed, Domain::QmcShift, idx);
                    let shift: Vec<f64> = (0..dim).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
                    self.lattice_mean(&generator, &shift, points)
                })
                .collect();
            let k = shift_means.len() as f64;
            let mean = shift_means.iter().sum::<f64>() / k;
            let var = shift_means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
            let stderr = (var / k).sqrt();
            let capped = stderr > opts.accuracy && points * 2 > opts.max_points;
            if stderr <= opts.accuracy || capped {
                return ProbabilityEstimate {
                    value: mean.clamp(0.0, 1.0),
                    stderr,
                    method: Method::Qmc,
                    points,
                    capped,
                };
            }
            points *= 2;
            round += 1;
        }
    }

    fn lattice_mean(&self, generator: &[f64], shift: &[f64], points: usize) -> f64 {
        let dim = generator.len();
        let mut u = vec![0.0; dim];
        let mut v = vec![0.0; dim];
        let mut w = vec![0.0; self.rank()];
        let mut sum = 0.0;
        for j in 1..=points {
            let jf = j as f64;
            for t in 0..dim {
                let x = (jf * generator[t] + shift[t]).fract();
                let tent = (2.0 * x - 1.0).abs();
                u[t] = tent;
                v[t] = 1.0 - tent;
            }
            sum += 0.5 * (self.eval(&u, &mut w) + self.eval(&v, &mut w));
        }
        sum / points as f64
    }
}

/// Fractional parts of square roots of the first `dim` primes.
fn richtmyer(dim: usize) -> Vec<f64> {
    let mut primes = Vec::with_capacity(dim);
    let mut c = 2u64;
    while primes.len() < dim {
        if (2..c).take_while(|d| d * d <= c).all(|d| !c.is_multiple_of(d)) {
            primes.push(c);
        }
        c += 1;
    }
    primes.iter().map(|&p| (p as f64).sqrt().fract()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn equicorrelated(m: usize, rho: f64) -> DMatrix<f64> {
        DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { rho })
    }

    fn orthant(m: usize) -> (DVector<f64>, DVector<f64>) {
        (DVector::zeros(m), DVector::from_element(m, f64::INFINITY))
    }

    #[test]
    fn univariate_interval() {
        let r = GaussianRegion::new(
            DVector::zeros(1),
            DMatrix::identity(1, 1),
            DVector::from_element(1, -1.96),
            DVector::from_element(1, 1.96),
        )
        .unwrap();
        let est = mvn_rectangle(&r, 5e-4, 1).unwrap();
        assert_eq!(est.method, Method::ClosedForm1d);
        assert_abs_diff_eq!(est.value, 2.0 * normal_cdf(1.96) - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(est.value, 0.95, epsilon = 5e-4);
    }

    #[test]
    fn independent_orthant_is_exact() {
        let (lo, hi) = orthant(3);
        let r = GaussianRegion::new(DVector::zeros(3), DMatrix::identity(3, 3), lo, hi).unwrap();
        let est = mvn_rectangle(&r, 5e-4, 1).unwrap();
        assert_eq!(est.method, Method::ClosedFormIndependent);
        assert_eq!(est.value, 0.125);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn equicorrelated_orthant() {
        let (lo, hi) = orthant(3);
        let r = GaussianRegion::new(DVector::zeros(3), equicorrelated(3, 0.5), lo, hi).unwrap();
        let est = mvn_rectangle(&r, 1e-4, 11).unwrap();
        let oracle = 0.125 + 3.0 / (4.0 * PI) * 0.5f64.asin();
        assert_abs_diff_eq!(oracle, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(est.value, oracle, epsilon = 5e-4);
        assert_eq!(est.method, Method::Qmc);
    }

    #[test]
    fn bivariate_orthant_signed() {
        let rho = 0.3;
        let cov = equicorrelated(2, rho);
        let est = mvn_orthant_signed(&DVector::zeros(2), &cov, &[1.0, 1.0], 1e-4, 3).unwrap();
        let oracle = 0.25 + rho.asin() / (2.0 * PI);
        assert_abs_diff_eq!(est.value, oracle, epsilon = 5e-4);
        // (+,-) uses the negated correlation
        let est = mvn_orthant_signed(&DVector::zeros(2), &cov, &[1.0, -1.0], 1e-4, 3).unwrap();
        assert_abs_diff_eq!(est.value, 0.25 - rho.asin() / (2.0 * PI), epsilon = 5e-4);
    }

    #[test]
    fn signed_symmetry_and_concentration() {
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.4, -0.2, 0.4, 1.5, 0.3, -0.2, 0.3, 0.8]);
        let mean = DVector::from_vec(vec![0.3, -0.5, 0.9]);
        let z = [1.0, -1.0, 1.0];
        let nz = [-1.0, 1.0, -1.0];
        let p1 = mvn_orthant_signed(&mean, &cov, &z, 1e-4, 5).unwrap();
        let p2 = mvn_orthant_signed(&(-&mean), &cov, &nz, 1e-4, 5).unwrap();
        assert_abs_diff_eq!(p1.value, p2.value, epsilon = 1e-12);

        let far = DVector::from_element(3, 40.0);
        let p = mvn_orthant_signed(&far, &cov, &[1.0; 3], 1e-4, 5).unwrap();
        assert!(p.value > 1.0 - 1e-9);
    }

    #[test]
    fn singular_covariance_reduces_rank() {
        // Z2 = Z1 exactly: P[Z1 > 0, Z2 > 0] = 1/2; P[Z1 > 0, Z2 < -1] = 0
        let cov = DMatrix::from_element(2, 2, 1.0);
        let r = GaussianRegion::new(
            DVector::zeros(2),
            cov.clone(),
            DVector::zeros(2),
            DVector::from_element(2, f64::INFINITY),
        )
        .unwrap();
        let est = mvn_rectangle(&r, 1e-4, 1).unwrap();
        assert_abs_diff_eq!(est.value, 0.5, epsilon = 1e-12);
        let r = GaussianRegion::new(
            DVector::zeros(2),
            cov,
            DVector::from_vec(vec![0.0, f64::NEG_INFINITY]),
            DVector::from_vec(vec![f64::INFINITY, -1.0]),
        )
        .unwrap();
        assert_eq!(mvn_rectangle(&r, 1e-4, 1).unwrap().value, 0.0);

        // a constant coordinate outside its bounds
        let mut cov = DMatrix::identity(3, 3);
        cov[(2, 2)] = 0.0;
        cov[(0, 1)] = 0.5;
        cov[(1, 0)] = 0.5;
        let r = GaussianRegion::new(
            DVector::from_vec(vec![0.0, 0.0, 2.0]),
            cov,
            DVector::from_element(3, -1.0),
            DVector::from_element(3, 1.0),
        )
        .unwrap();
        assert_eq!(mvn_rectangle(&r, 1e-4, 1).unwrap().value, 0.0);
    }

    #[test]
    fn rank_two_in_three_dimensions() {
        // Z3 = (Z1 + Z2) / sqrt(2), orthant probability by direct simulation
        // of the two free coordinates on a fine grid.
        let s = 0.5f64.sqrt();
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, s, 0.0, 1.0, s, s, s, 1.0]);
        let r = GaussianRegion::new(
            DVector::zeros(3),
            cov,
            DVector::from_vec(vec![-0.5, f64::NEG_INFINITY, -0.2]),
            DVector::from_vec(vec![1.0, 0.8, f64::INFINITY]),
        )
        .unwrap();
        let est = mvn_rectangle(&r, 1e-5, 2).unwrap();
        // midpoint quadrature over (z1, z2)
        let (h, lim) = (2e-3, 8.0);
        let mut total = 0.0;
        let mut z1 = -0.5 + h / 2.0;
        while z1 < 1.0 {
            let mut z2 = -lim + h / 2.0;
            while z2 < 0.8 {
                if (z1 + z2) * s >= -0.2 {
                    total += normal_pdf(z1) * normal_pdf(z2) * h * h;
                }
                z2 += h;
            }
            z1 += h;
        }
        assert_abs_diff_eq!(est.value, total, epsilon = 2e-4);
    }

    #[test]
    fn rejects_non_psd_and_bad_bounds() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let (lo, hi) = orthant(2);
        let r = GaussianRegion::new(DVector::zeros(2), cov, lo, hi).unwrap();
        assert!(matches!(mvn_rectangle(&r, 1e-3, 1), Err(Error::NotPsd(_))));
        let r = GaussianRegion::new(
            DVector::zeros(1),
            DMatrix::identity(1, 1),
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 0.0),
        );
        assert!(r.is_err());
    }

    #[test]
    fn zero_width_interval_has_zero_probability() {
        let r = GaussianRegion::new(
            DVector::zeros(2),
            equicorrelated(2, 0.3),
            DVector::from_vec(vec![0.0, -1.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        )
        .unwrap();
        assert_eq!(mvn_rectangle(&r, 1e-4, 1).unwrap().value, 0.0);
    }
}
