//! Scenario definitions and the seeded replicate generator.
//!
//! Responses follow `y = X beta + e`, `e ~ N(0, sigma^2 I)`, and are centered;
//! the intercept is never simulated since every estimator downstream works
//! on centered data. Replicate `i` draws everything (support, signs,
//! magnitudes, noise, in that order) from its own substream.

mod presets;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::design::{ModelMatrix, Term};
use crate::error::{Error, Result};
use crate::rng::{substream, Domain};
use crate::support::SignedSupport;

pub use presets::{preset, preset_names};

/// How active-effect magnitudes are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaSpec {
    Fixed { value: f64 },
    /// `Exp(1) + sn`.
    ExpShift { sn: f64 },
    SampleSet {
        values: Vec<f64>,
        #[serde(default = "default_true")]
        with_replacement: bool,
    },
    /// The listed values go to the first active effects in draw order, `rest`
    /// to the remainder.
    Explicit { values: Vec<f64>, rest: f64 },
}

fn default_true() -> bool {
    true
}

fn default_sigma() -> f64 {
    1.0
}

impl BetaSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let ok = match self {
            BetaSpec::Fixed { value } => positive(*value),
            BetaSpec::ExpShift { sn } => sn.is_finite() && *sn >= 0.0,
            BetaSpec::SampleSet { values, .. } => !values.is_empty() && values.iter().all(|v| positive(*v)),
            BetaSpec::Explicit { values, rest } => positive(*rest) && values.iter().all(|v| positive(*v)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("beta", format!("`{self}` needs positive finite magnitudes")))
        }
    }

    /// The common magnitude, if the spec is degenerate.
    pub fn fixed_value(&self) -> Option<f64> {
        match self {
            BetaSpec::Fixed { value } => Some(*value),
            _ => None,
        }
    }

    /// Draws `count` magnitudes.
    pub fn draw<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<f64>> {
        Ok(match self {
            BetaSpec::Fixed { value } => vec![*value; count],
            BetaSpec::ExpShift { sn } => (0..count)
                .map(|_| {
                    let e: f64 = rng.sample(Exp1);
                    e + sn
                })
                .collect(),
            BetaSpec::SampleSet { values, with_replacement: true } => {
                (0..count).map(|_| values[rng.random_range(0..values.len())]).collect()
            }
            BetaSpec::SampleSet { values, with_replacement: false } => {
                if count > values.len() {
                    return Err(Error::InvalidScenario(format!(
                        "cannot draw {count} magnitudes without replacement from {} values",
                        values.len()
                    )));
                }
                sample(rng, values.len(), count).iter().map(|i| values[i]).collect()
            }
            BetaSpec::Explicit { values, rest } => {
                (0..count).map(|i| values.get(i).copied().unwrap_or(*rest)).collect()
            }
        })
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSpec::Fixed { value } => write!(f, "fixed:{value}"),
            BetaSpec::ExpShift { sn } => write!(f, "exp:{sn}"),
            BetaSpec::SampleSet { values, with_replacement: true } => write!(f, "set:{}", join(values)),
            BetaSpec::SampleSet { values, with_replacement: false } => write!(f, "setnr:{}", join(values)),
            BetaSpec::Explicit { values, rest } => write!(f, "list:{};rest:{rest}", join(values)),
        }
    }
}

impl FromStr for BetaSpec {
    type Err = Error;

    /// `fixed:<v>`, `exp:<SN>`, `set:<v1,v2,...>`; also `setnr:` (without
    /// replacement) and `list:<v1,...>;rest:<v>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::config("beta", format!("{msg} in `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("bad number"));
        let list = |t: &str| t.split(',').map(num).collect::<Result<Vec<f64>>>();
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected <kind>:<value>"))?;
        let spec = match kind {
            "fixed" => BetaSpec::Fixed { value: num(rest)? },
            "exp" => BetaSpec::ExpShift { sn: num(rest)? },
            "set" => BetaSpec::SampleSet { values: list(rest)?, with_replacement: true },
            "setnr" => BetaSpec::SampleSet { values: list(rest)?, with_replacement: false },
            "list" => {
                let (vals, tail) = rest.split_once(";rest:").ok_or_else(|| bad("expected ;rest:<v>"))?;
                BetaSpec::Explicit { values: list(vals)?, rest: num(tail)? }
            }
            _ => return Err(bad("unknown kind (fixed|exp|set)")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignRule {
    KnownPositive,
    Random,
}

impl FromStr for SignRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known" | "known_positive" => Ok(SignRule::KnownPositive),
            "unknown" | "random" => Ok(SignRule::Random),
            _ => Err(Error::config("signs", format!("expected known|unknown, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heredity {
    #[default]
    None,
    /// Every active interaction has at least one active parent.
    Weak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreeningScenario {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Active main effects.
    pub a: usize,
    /// Active two-factor interactions.
    #[serde(default)]
    pub g: usize,
    pub beta: BetaSpec,
    /// Interaction magnitudes; `beta` is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfi_beta: Option<BetaSpec>,
    pub signs: SignRule,
    #[serde(default)]
    pub heredity: Heredity,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub niter: usize,
    pub seed: u64,
}

impl ScreeningScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scn: ScreeningScenario = serde_json::from_str(text)?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        if self.niter == 0 {
            return Err(Error::config("niter", "must be at least 1"));
        }
        self.beta.validate()?;
        if let Some(t) = &self.tfi_beta {
            t.validate().map_err(|_| Error::config("tfi_beta", format!("`{t}` needs positive magnitudes")))?;
        }
        if self.g > 0 && self.heredity == Heredity::Weak && self.a == 0 {
            return Err(Error::InvalidScenario(
                "weak heredity with active interactions needs at least one active main effect".into(),
            ));
        }
        Ok(())
    }

    pub fn needs_interactions(&self) -> bool {
        self.g > 0
    }

    /// First 16 hex digits of the SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(&json))[..16].to_string()
    }

    /// Checks the scenario against a model matrix and returns the number of
    /// interactions that will actually be drawn per replicate (capped at the
    /// size of the admissible pool).
    pub fn effective_g(&self, m: &ModelMatrix) -> Result<usize> {
        let me = m.main_effect_indices().len();
        if self.a > me {
            return Err(Error::InvalidScenario(format!("a = {} exceeds the {me} main effects", self.a)));
        }
        if self.g == 0 {
            return Ok(0);
        }
        let fi = m.interaction_indices().len();
        if fi == 0 {
            return Err(Error::InvalidScenario("active interactions need a model matrix with interactions".into()));
        }
        let pool = match self.heredity {
            Heredity::None => fi,
            // pairs with at least one active parent, same count for every parent set
            Heredity::Weak => {
                let off = me - self.a;
                fi - off * off.saturating_sub(1) / 2
            }
        };
        Ok(self.g.min(pool))
    }

    /// Draws a signed support over the model's terms.
    pub fn draw_support<R: Rng + ?Sized>(&self, m: &ModelMatrix, rng: &mut R) -> Result<SignedSupport> {
        let g = self.effective_g(m)?;
        let terms = m.terms();
        let me: Vec<usize> = m.main_effect_indices();
        let chosen_me: Vec<usize> = sample(rng, me.len(), self.a).iter().map(|i| me[i]).collect();
        let mut chosen_fi = Vec::with_capacity(g);
        if g > 0 {
            let parents: Vec<usize> = chosen_me
                .iter()
                .map(|&t| match terms[t] {
                    Term::MainEffect(j) => j,
                    Term::Interaction(..) => unreachable!("main effect index"),
                })
                .collect();
            let pool: Vec<usize> = m
                .interaction_indices()
                .into_iter()
                .filter(|&t| match (self.heredity, terms[t]) {
                    (Heredity::None, _) => true,
                    (Heredity::Weak, Term::Interaction(j, l)) => parents.contains(&j) || parents.contains(&l),
                    (Heredity::Weak, Term::MainEffect(_)) => false,
                })
                .collect();
            chosen_fi.extend(sample(rng, pool.len(), g).iter().map(|i| pool[i]));
        }
        let total = chosen_me.len() + chosen_fi.len();
        let signs: Vec<i8> = match self.signs {
            SignRule::KnownPositive => vec![1; total],
            SignRule::Random => (0..total).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect(),
        };
        let mut magnitudes = self.beta.draw(chosen_me.len(), rng)?;
        magnitudes.extend(self.tfi_beta.as_ref().unwrap_or(&self.beta).draw(chosen_fi.len(), rng)?);
        let mut active = chosen_me;
        active.extend(chosen_fi);
        SignedSupport::new(active, signs, magnitudes)
    }
}

/// One simulated data set.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub index: usize,
    pub support: SignedSupport,
    pub beta_full: DVector<f64>,
    /// Centered response.
    pub response: DVector<f64>,
}

/// Centered `X beta + sigma e` for a given coefficient vector.
pub fn simulate_response<R: Rng + ?Sized>(m: &ModelMatrix, beta: &DVector<f64>, sigma: f64, rng: &mut R) -> DVector<f64> {
    let n = m.runs();
    let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = m.columns() * beta + noise * sigma;
    let mean = y.mean();
    y.add_scalar(-mean)
}

/// Replicate `index` of the scenario; independent of every other replicate.
pub fn replicate(m: &ModelMatrix, scn: &ScreeningScenario, index: usize) -> Result<Replicate> {
    let mut rng = substream(scn.seed, Domain::Replicate, index as u64);
    let support = scn.draw_support(m, &mut rng)?;
    let beta_full = support.beta_full(m.p())?;
    let response = simulate_response(m, &beta_full, scn.sigma, &mut rng);
    Ok(Replicate {
        index,
        support,
        beta_full,
        response,
    })
}

/// All `niter` replicates, generated in parallel and returned in index order.
pub fn generate_replicates(m: &ModelMatrix, scn: &ScreeningScenario) -> Result<Vec<Replicate>> {
    scn.validate()?;
    scn.effective_g(m)?;
    (0..scn.niter).into_par_iter().map(|i| replicate(m, scn, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_spec_strings_round_trip() {
        for s in ["fixed:3.5", "exp:3", "set:2,2.5,3,3.5", "list:10,8,5,3;rest:2"] {
            let spec: BetaSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("fixed:-1".parse::<BetaSpec>().is_err());
        assert!("gamma:2".parse::<BetaSpec>().is_err());
        let err = "set:".parse::<BetaSpec>().unwrap_err().to_string();
        assert!(err.contains("`beta`"), "{err}");
    }

    #[test]
    fn explicit_magnitudes_in_draw_order() {
        let spec: BetaSpec = "list:10,8,5,3;rest:2".parse().unwrap();
        let mut rng = substream(0, Domain::BetaDraw, 0);
        assert_eq!(spec.draw(6, &mut rng).unwrap(), vec![10.0, 8.0, 5.0, 3.0, 2.0, 2.0]);
    }

    #[test]
    fn scenario_json_rejects_unknown_fields_and_bad_values() {
        let ok = r#"{"a":2,"beta":{"kind":"fixed","value":3},"signs":"random","niter":10,"seed":1}"#;
        let scn = ScreeningScenario::from_json(ok).unwrap();
        assert_eq!(scn.sigma, 1.0);
        assert_eq!(scn.heredity, Heredity::None);
        assert!(ScreeningScenario::from_json(&ok.replace("\"seed\"", "\"sede\"")).is_err());
        let zero = ok.replace("\"niter\":10", "\"niter\":0");
        assert!(ScreeningScenario::from_json(&zero).unwrap_err().to_string().contains("niter"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let scn = preset("marley_woods_14_24_a6_b3").unwrap();
        assert_eq!(scn.hash(), scn.clone().hash());
        let mut other = scn.clone();
        other.seed += 1;
        assert_ne!(scn.hash(), other.hash());
        assert_eq!(scn.hash().len(), 16);
    }
}
