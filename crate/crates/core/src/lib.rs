//! Support and sign recovery probabilities for two-level screening designs.
//!
//! Designs are scored by how likely the lasso, the Dantzig selector and the
//! Gauss-Dantzig selector are to recover the true active effects along the
//! whole tuning path. Exact lasso sign-recovery curves come from Gaussian
//! rectangle probabilities; everything else is seeded Monte Carlo.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod gds;
pub mod mvnorm;
pub mod recovery;
pub mod rng;
pub mod simulate;
pub mod solvers;
pub mod support;

pub use design::{Design, ModelMatrix, Term};
pub use error::{Error, Result};
pub use recovery::{CurveKind, RecoveryCurve};
pub use simulate::{BetaSpec, ScreeningScenario, SignRule};
pub use solvers::{Estimator, LambdaGrid, SolutionPath};
pub use support::SignedSupport;
