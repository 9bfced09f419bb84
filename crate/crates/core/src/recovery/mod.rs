//! Support and sign-recovery probability curves over the lambda path.

mod curve;
mod events;
mod exact;
mod sim;

pub use curve::{default_log_grid, descriptor_hash, log_lambda_grid, CurveKind, RecoveryCurve, Sampling};
pub use events::{phi_empty, EventRegions, PhiPoint, SignRecoveryEvents};
pub use exact::{
    binomial, phi_average, phi_average_supports, phi_exact, sign_representative, unrank_combination,
    PhiAverageOptions, SignEnumeration,
};
pub use sim::{sim_recovery, sim_recovery_split, SplitCurves, Target};

/// Region pair for `(M, s, sigma, lambda)`; `None` when `X_A' X_A` is singular.
pub fn sign_recovery_events(
    m: &crate::design::ModelMatrix,
    s: &crate::support::SignedSupport,
    sigma: f64,
    lambda: f64,
) -> crate::Result<Option<EventRegions>> {
    SignRecoveryEvents::new(m, s, sigma)?.map(|e| e.regions(lambda)).transpose()
}
