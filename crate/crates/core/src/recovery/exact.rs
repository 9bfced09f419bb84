//! Exact lasso sign-recovery probabilities and their support averages.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::curve::{check_log_grid, descriptor_hash, CurveKind, RecoveryCurve, Sampling};
use super::events::{PhiPoint, SignRecoveryEvents};
use crate::design::ModelMatrix;
use crate::error::{Error, Result};
use crate::mvnorm::DEFAULT_ACCURACY;
use crate::rng::{substream, Domain};
use crate::simulate::{BetaSpec, SignRule};
use crate::solvers::Estimator;
use crate::support::SignedSupport;

/// `phi` at each `log(lambda)`. A support with singular `X_A' X_A` gets 0.
pub fn phi_exact(
    m: &ModelMatrix,
    s: &SignedSupport,
    sigma: f64,
    log_lambda: &[f64],
    accuracy: f64,
    seed: u64,
) -> Result<Vec<PhiPoint>> {
    check_log_grid(log_lambda)?;
    let Some(events) = SignRecoveryEvents::new(m, s, sigma)? else {
        let zero = PhiPoint { phi: 0.0, p_i: None, p_s: 0.0, stderr: 0.0 };
        return Ok(vec![zero; log_lambda.len()]);
    };
    log_lambda
        .par_iter()
        .map(|&l| events.phi(l.exp(), accuracy, seed))
        .collect()
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot;
        loop {
            let with_next = binomial(n - next - 1, remaining - 1).expect("fits");
            if rank < with_next {
                out.push(next);
                next += 1;
                break;
            }
            rank -= with_next;
            next += 1;
        }
    }
    out
}

/// Sign vector number `index` among the `2^(a-1)` vectors with `z_1 = +1`.
pub fn sign_representative(a: usize, index: u64) -> Vec<i8> {
    (0..a)
        .map(|i| if i > 0 && (index >> (i - 1)) & 1 == 1 { -1 } else { 1 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignEnumeration {
    /// `2^(a-1)` vectors with the first sign fixed at `+1`.
    Representatives,
    /// All `2^a` vectors.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiAverageOptions {
    pub sigma: f64,
    /// Largest number of (support, sign) items evaluated for a fixed
    /// magnitude before switching to sampling.
    pub budget: usize,
    /// Draws of `(support, beta)` when the magnitudes are random.
    pub draws: usize,
    pub accuracy: f64,
    pub seed: u64,
    pub enumeration: SignEnumeration,
}

impl Default for PhiAverageOptions {
    fn default() -> Self {
        PhiAverageOptions {
            sigma: 1.0,
            budget: 10_000,
            draws: 1000,
            accuracy: DEFAULT_ACCURACY,
            seed: 1,
            enumeration: SignEnumeration::Representatives,
        }
    }
}

impl PhiAverageOptions {
    fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::config("budget", "must be at least 1"));
        }
        if self.draws < 1 {
            return Err(Error::config("niter", "must be at least 1"));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        if !(self.accuracy > 0.0) {
            return Err(Error::config("accuracy", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct PhiDescriptor<'a> {
    a: usize,
    beta: String,
    signs: SignRule,
    opts: &'a PhiAverageOptions,
}

struct Averaged {
    prob: Vec<f64>,
    sample_sd: Vec<f64>,
    mvn_stderr: Vec<f64>,
}

fn average(rows: &[Vec<PhiPoint>], d: usize) -> Averaged {
    let b = rows.len() as f64;
    let mut prob = vec![0.0; d];
    let mut mvn = vec![0.0; d];
    for row in rows {
        for (t, pt) in row.iter().enumerate() {
            prob[t] += pt.phi;
            mvn[t] += pt.stderr * pt.stderr;
        }
    }
    prob.iter_mut().for_each(|v| *v /= b);
    let mut sd = vec![0.0; d];
    if rows.len() > 1 {
        for row in rows {
            for (t, pt) in row.iter().enumerate() {
                sd[t] += (pt.phi - prob[t]).powi(2);
            }
        }
        sd.iter_mut().for_each(|v| *v = (*v / (b - 1.0)).sqrt());
    }
    Averaged {
        prob,
        sample_sd: sd,
        mvn_stderr: mvn.iter().map(|v| v.sqrt() / b).collect(),
    }
}

fn check_a(m: &ModelMatrix, a: usize) -> Result<()> {
    if a < 1 {
        return Err(Error::config("a", "must be at least 1"));
    }
    if a >= m.runs() {
        return Err(Error::config("a", format!("a = {a} must be below the run size n = {}", m.runs())));
    }
    if a > m.p() {
        return Err(Error::config("a", format!("a = {a} exceeds p = {}", m.p())));
    }
    Ok(())
}

fn sign_vectors(a: usize, rule: SignRule, enumeration: SignEnumeration) -> Vec<Vec<i8>> {
    match (rule, enumeration) {
        (SignRule::KnownPositive, _) => vec![vec![1; a]],
        (SignRule::Random, SignEnumeration::Representatives) => {
            (0..1u64 << (a - 1)).map(|i| sign_representative(a, i)).collect()
        }
        (SignRule::Random, SignEnumeration::Full) => (0..1u64 << a)
            .map(|i| (0..a).map(|b| if (i >> b) & 1 == 1 { -1 } else { 1 }).collect())
            .collect(),
    }
}

/// Averages `phi` over all listed supports, each with every sign vector of
/// the rule, at a common magnitude. No sampling.
pub fn phi_average_supports(
    m: &ModelMatrix,
    supports: &[Vec<usize>],
    magnitude: f64,
    signs: SignRule,
    log_lambda: &[f64],
    opts: &PhiAverageOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    opts.validate()?;
    check_log_grid(log_lambda)?;
    let a = supports.first().map_or(0, Vec::len);
    check_a(m, a)?;
    let vectors = sign_vectors(a, signs, opts.enumeration);
    let items: Vec<SignedSupport> = supports
        .iter()
        .flat_map(|sup| {
            vectors
                .iter()
                .map(move |z| SignedSupport::new(sup.clone(), z.clone(), vec![magnitude; sup.len()]))
        })
        .collect::<Result<_>>()?;
    let rows = items
        .par_iter()
        .map(|s| phi_exact(m, s, opts.sigma, log_lambda, opts.accuracy, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    let avg = average(&rows, log_lambda.len());
    Ok((avg.prob, avg.mvn_stderr))
}

/// `Phi_lambda` (known signs) or `Phi_lambda^+-` (unknown signs) over all
/// supports of size `a`.
///
/// With a fixed magnitude, every (support, sign representative) item is
/// evaluated when their count is within `budget`; otherwise `budget` items
/// are sampled uniformly without replacement. Random magnitudes use
/// `opts.draws` independent (support, signs, magnitudes) draws.
pub fn phi_average(
    m: &ModelMatrix,
    a: usize,
    beta: &BetaSpec,
    signs: SignRule,
    log_lambda: &[f64],
    opts: &PhiAverageOptions,
) -> Result<RecoveryCurve> {
    opts.validate()?;
    beta.validate()?;
    check_log_grid(log_lambda)?;
    check_a(m, a)?;
    let p = m.p();
    let d = log_lambda.len();

    let (rows, sampling, fpc) = match beta.fixed_value() {
        Some(magnitude) => {
            let vectors = sign_vectors(a, signs, opts.enumeration);
            let per_support = vectors.len() as u128;
            let population = binomial(p, a)
                .and_then(|c| c.checked_mul(per_support))
                .ok_or_else(|| Error::config("a", "number of supports overflows"))?;
            let item = |i: u128| -> Result<SignedSupport> {
                let support = unrank_combination(p, a, i / per_support);
                let z = vectors[(i % per_support) as usize].clone();
                SignedSupport::new(support, z, vec![magnitude; a])
            };
            let (indices, sampling, fpc): (Vec<u128>, _, f64) = if population <= opts.budget as u128 {
                ((0..population).collect(), Sampling::Enumerated { items: population as usize }, 0.0)
            } else {
                let total = usize::try_from(population).map_err(|_| Error::config("a", "too many supports to sample"))?;
                let mut rng = substream(opts.seed, Domain::SupportSample, 0);
                let mut idx: Vec<usize> = sample(&mut rng, total, opts.budget).into_vec();
                idx.sort_unstable();
                let b = opts.budget as f64;
                (
                    idx.into_iter().map(|i| i as u128).collect(),
                    Sampling::Sampled { items: opts.budget, population: population.to_string() },
                    1.0 - b / population as f64,
                )
            };
            let rows = indices
                .par_iter()
                .map(|&i| phi_exact(m, &item(i)?, opts.sigma, log_lambda, opts.accuracy, opts.seed))
                .collect::<Result<Vec<_>>>()?;
            (rows, sampling, fpc)
        }
        None => {
            let draw = |i: usize| -> Result<SignedSupport> {
                let mut rng = substream(opts.seed, Domain::BetaDraw, i as u64);
                let support = sample(&mut rng, p, a).into_vec();
                let z: Vec<i8> = match signs {
                    SignRule::KnownPositive => vec![1; a],
                    SignRule::Random => (0..a).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect(),
                };
                let mags = beta.draw(a, &mut rng)?;
                SignedSupport::new(support, z, mags)
            };
            let rows = (0..opts.draws)
                .into_par_iter()
                .map(|i| phi_exact(m, &draw(i)?, opts.sigma, log_lambda, opts.accuracy, opts.seed))
                .collect::<Result<Vec<_>>>()?;
            (rows, Sampling::Drawn { items: opts.draws }, 1.0)
        }
    };
    let b = rows.len() as f64;
    let avg = average(&rows, d);
    let stderr = avg.sample_sd.iter().map(|s| (fpc * s * s / b).sqrt()).collect();
    let descriptor = PhiDescriptor { a, beta: beta.to_string(), signs, opts };
    Ok(RecoveryCurve {
        design_id: m.design_id().to_string(),
        estimator: Estimator::Lasso,
        kind: CurveKind::ExactSign,
        log_lambda: log_lambda.to_vec(),
        prob: avg.prob,
        stderr,
        mvn_stderr: Some(avg.mvn_stderr),
        mvn_accuracy: Some(opts.accuracy),
        scenario: format!("a={a};beta={beta};signs={}", sign_label(signs)),
        scenario_hash: descriptor_hash(&descriptor),
        sampling,
        nonconverged: 0,
    })
}

fn sign_label(s: SignRule) -> &'static str {
    match s {
        SignRule::KnownPositive => "known",
        SignRule::Random => "unknown",
    }
}
