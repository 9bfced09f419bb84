use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An active set with signs and positive magnitudes, stored sorted by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedSupport {
    active: Vec<usize>,
    signs: Vec<i8>,
    magnitudes: Vec<f64>,
}

impl SignedSupport {
    /// Entries may come in any order; they are sorted jointly by index.
    pub fn new(active: Vec<usize>, signs: Vec<i8>, magnitudes: Vec<f64>) -> Result<Self> {
        if active.len() != signs.len() || active.len() != magnitudes.len() {
            return Err(Error::Dimension(format!(
                "support of size {} with {} signs and {} magnitudes",
                active.len(),
                signs.len(),
                magnitudes.len()
            )));
        }
        if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidArgument(format!("sign {s} is not +1 or -1")));
        }
        if let Some(m) = magnitudes.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidArgument(format!("magnitude {m} is not positive")));
        }
        let mut order: Vec<usize> = (0..active.len()).collect();
        order.sort_by_key(|&i| active[i]);
        let active: Vec<usize> = order.iter().map(|&i| active[i]).collect();
        if active.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("support has repeated indices".into()));
        }
        Ok(SignedSupport {
            signs: order.iter().map(|&i| signs[i]).collect(),
            magnitudes: order.iter().map(|&i| magnitudes[i]).collect(),
            active,
        })
    }

    /// All-positive signs with a common magnitude.
    pub fn uniform(active: Vec<usize>, magnitude: f64) -> Result<Self> {
        let a = active.len();
        Self::new(active, vec![1; a], vec![magnitude; a])
    }

    pub fn empty() -> Self {
        SignedSupport {
            active: Vec::new(),
            signs: Vec::new(),
            magnitudes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn with_signs(&self, signs: Vec<i8>) -> Result<Self> {
        Self::new(self.active.clone(), signs, self.magnitudes.clone())
    }

    /// Signed coefficients `z_j * |beta_j|` in index order.
    pub fn coefficients(&self) -> Vec<f64> {
        self.signs
            .iter()
            .zip(&self.magnitudes)
            .map(|(&s, &m)| f64::from(s) * m)
            .collect()
    }

    /// The full coefficient vector of length `p`.
    pub fn beta_full(&self, p: usize) -> Result<DVector<f64>> {
        if let Some(&j) = self.active.last().filter(|&&j| j >= p) {
            return Err(Error::Dimension(format!("support index {j} out of range for p = {p}")));
        }
        let mut beta = DVector::zeros(p);
        for (&j, c) in self.active.iter().zip(self.coefficients()) {
            beta[j] = c;
        }
        Ok(beta)
    }

    /// The signed pattern over `p` coefficients: `+1`, `-1` or `0`.
    pub fn sign_pattern(&self, p: usize) -> Vec<i8> {
        let mut out = vec![0; p];
        for (&j, &s) in self.active.iter().zip(&self.signs) {
            out[j] = s;
        }
        out
    }
}
