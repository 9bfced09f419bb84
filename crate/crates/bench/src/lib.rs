//! Fixtures shared by the benchmarks.

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use screenpath::design::half_fraction_ssd;
use screenpath::ModelMatrix;

/// The 14-run, 24-factor half-fraction SSD, centered and scaled.
pub fn ssd_14_24() -> ModelMatrix {
    let d = half_fraction_ssd(28).and_then(|d| d.truncate_factors(24)).expect("order 28 is constructible");
    ModelMatrix::build(&d, false, true, true).expect("balanced design")
}

/// A centered response with `a` actives of magnitude 3 and random signs.
pub fn response(m: &ModelMatrix, a: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut beta = DVector::zeros(m.p());
    for j in sample(&mut rng, m.p(), a) {
        beta[j] = if rng.random_bool(0.5) { 3.0 } else { -3.0 };
    }
    let e = DVector::from_fn(m.runs(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = m.columns() * beta + e;
    y.add_scalar(-y.mean())
}
