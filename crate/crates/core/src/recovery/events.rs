//! Gaussian events behind lasso sign recovery.
//!
//! For a signed support `(A, z)` the lasso (with the `1/(2n)` loss) recovers
//! the signed support at `lambda` exactly when both
//!
//! * S: `z o b_A > 0`, where `b_A = beta_A + G^-1 (X_A' e - n lambda z)`,
//!   `G = X_A' X_A`, so `b_A ~ N(beta_A - n lambda G^-1 z, sigma^2 G^-1)`;
//! * I: `|w + lambda c| <= lambda` componentwise, with
//!   `w = X_I' P e / n ~ N(0, sigma^2 / n^2 X_I' P X_I)`, `P` the projection
//!   off the span of `X_A` and `c = X_I' X_A G^-1 z`.
//!
//! `b_A` depends on `e` only through `X_A' e` and `w` only through `P e`, so
//! the two events are independent.

use nalgebra::{DMatrix, DVector};

use crate::design::ModelMatrix;
use crate::error::{Error, Result};
use crate::mvnorm::{mvn_rectangle, GaussianRegion};
use crate::rng::derive_seed;
use crate::support::SignedSupport;

/// Per-support quantities that do not depend on lambda.
#[derive(Debug, Clone)]
pub struct SignRecoveryEvents {
    n: f64,
    /// `z o beta_A`, i.e. the magnitudes.
    signal: DVector<f64>,
    /// `z o G^-1 z`.
    drift: DVector<f64>,
    /// Covariance of `z o b_A`.
    s_cov: DMatrix<f64>,
    /// `X_I' X_A G^-1 z`; empty when every term is active.
    irrep: DVector<f64>,
    i_cov: DMatrix<f64>,
    /// Whether the I-event is evaluated reflected (`w -> -w`), which keeps
    /// the computation identical for `z` and `-z`.
    reflect: bool,
    seed_key: u64,
}

/// Both regions at one lambda. `i_region` is `None` when no term is inactive.
#[derive(Debug, Clone)]
pub struct EventRegions {
    pub s_region: GaussianRegion,
    pub i_region: Option<GaussianRegion>,
}

/// `phi = P[I] P[S]` at one lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPoint {
    pub phi: f64,
    /// Not evaluated when `P[S]` is exactly zero.
    pub p_i: Option<f64>,
    pub p_s: f64,
    /// Integration error propagated to the product.
    pub stderr: f64,
}

impl SignRecoveryEvents {
    /// Returns `None` when `X_A' X_A` is singular: the support cannot be
    /// sign-recovered.
    pub fn new(m: &ModelMatrix, s: &SignedSupport, sigma: f64) -> Result<Option<Self>> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        if s.is_empty() {
            return Err(Error::InvalidArgument("sign recovery events need a nonempty support".into()));
        }
        let p = m.p();
        if let Some(&j) = s.active().last().filter(|&&j| j >= p) {
            return Err(Error::Dimension(format!("support index {j} out of range for p = {p}")));
        }
        let n = m.runs() as f64;
        let xa = m.select(s.active());
        let g = xa.tr_mul(&xa);
        let max_diag = (0..g.nrows()).map(|i| g[(i, i)]).fold(0.0, f64::max);
        let Some(chol) = g.clone().cholesky() else {
            return Ok(None);
        };
        let l = chol.l_dirty();
        if (0..g.nrows()).any(|i| l[(i, i)] * l[(i, i)] < 1e-10 * max_diag) {
            return Ok(None);
        }
        let ginv = chol.inverse();
        let z = DVector::from_iterator(s.len(), s.signs().iter().map(|&v| f64::from(v)));
        let ginv_z = &ginv * &z;
        let a = s.len();
        let signal = DVector::from_column_slice(s.magnitudes());
        let drift = z.component_mul(&ginv_z);
        let s_cov = DMatrix::from_fn(a, a, |i, j| z[i] * z[j] * ginv[(i, j)] * sigma * sigma);

        let inactive: Vec<usize> = (0..p).filter(|j| s.active().binary_search(j).is_err()).collect();
        let (irrep, i_cov) = if inactive.is_empty() {
            (DVector::zeros(0), DMatrix::zeros(0, 0))
        } else {
            let xi = m.select(&inactive);
            let cross = xi.tr_mul(&xa);
            let irrep = &cross * &ginv_z;
            // X_I' P X_I = X_I' X_I - X_I' X_A G^-1 X_A' X_I
            let mut i_cov = xi.tr_mul(&xi) - &cross * &ginv * cross.transpose();
            i_cov *= sigma * sigma / (n * n);
            i_cov = (&i_cov + i_cov.transpose()) * 0.5;
            (irrep, i_cov)
        };

        let first_sign = s.signs()[0];
        let mut key = derive_seed(0x5349_474E, s.len() as u64);
        for (&j, &sg) in s.active().iter().zip(s.signs()) {
            let canon = sg * first_sign;
            key = derive_seed(key, ((j as u64) << 1) | u64::from(canon < 0));
        }
        for &v in s.magnitudes() {
            key = derive_seed(key, v.to_bits());
        }
        key = derive_seed(key, sigma.to_bits());

        Ok(Some(SignRecoveryEvents {
            n,
            signal,
            drift,
            s_cov,
            irrep,
            i_cov,
            reflect: first_sign < 0,
            seed_key: key,
        }))
    }

    pub fn inactive_count(&self) -> usize {
        self.irrep.len()
    }

    pub fn regions(&self, lambda: f64) -> Result<EventRegions> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {lambda}")));
        }
        let a = self.signal.len();
        let s_mean = &self.signal - &self.drift * (self.n * lambda);
        let s_region = GaussianRegion::new(
            s_mean,
            self.s_cov.clone(),
            DVector::zeros(a),
            DVector::from_element(a, f64::INFINITY),
        )?;
        let i_region = if self.irrep.is_empty() {
            None
        } else {
            let (lo, hi): (DVector<f64>, DVector<f64>) = if self.reflect {
                (
                    self.irrep.map(|c| -lambda * (1.0 - c)),
                    self.irrep.map(|c| lambda * (1.0 + c)),
                )
            } else {
                (
                    self.irrep.map(|c| -lambda * (1.0 + c)),
                    self.irrep.map(|c| lambda * (1.0 - c)),
                )
            };
            Some(GaussianRegion::new(DVector::zeros(self.irrep.len()), self.i_cov.clone(), lo, hi)?)
        };
        Ok(EventRegions { s_region, i_region })
    }

    /// `phi` at `lambda`, integrating both events to `accuracy`. The QMC
    /// seeds depend only on `(seed, signed support up to global sign, lambda)`.
    pub fn phi(&self, lambda: f64, accuracy: f64, seed: u64) -> Result<PhiPoint> {
        let regions = self.regions(lambda)?;
        let key = derive_seed(derive_seed(seed, self.seed_key), lambda.to_bits());
        let s = mvn_rectangle(&regions.s_region, accuracy, derive_seed(key, 1))?;
        if s.value == 0.0 && s.stderr == 0.0 {
            return Ok(PhiPoint { phi: 0.0, p_i: None, p_s: 0.0, stderr: 0.0 });
        }
        let (pi, pi_se) = match &regions.i_region {
            None => (1.0, 0.0),
            Some(r) => {
                let e = mvn_rectangle(r, accuracy, derive_seed(key, 2))?;
                (e.value, e.stderr)
            }
        };
        let phi = (pi * s.value).clamp(0.0, 1.0);
        let stderr = ((s.value * pi_se).powi(2) + (pi * s.stderr).powi(2)).sqrt();
        Ok(PhiPoint { phi, p_i: Some(pi), p_s: s.value, stderr })
    }
}

/// Probability that the lasso returns all zeros when nothing is active:
/// `P[|X'e/n|_inf <= lambda]`.
pub fn phi_empty(m: &ModelMatrix, sigma: f64, lambda: f64, accuracy: f64, seed: u64) -> Result<f64> {
    let n = m.runs() as f64;
    let p = m.p();
    let cov = m.gram() * (sigma * sigma / (n * n));
    let region = GaussianRegion::new(
        DVector::zeros(p),
        cov,
        DVector::from_element(p, -lambda),
        DVector::from_element(p, lambda),
    )?;
    Ok(mvn_rectangle(&region, accuracy, seed)?.value)
}
