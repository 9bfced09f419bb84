use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridOrigin {
    Fine100,
    Coarse12,
    Custom,
}

/// Strictly decreasing, positive tuning values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaGrid {
    values: Vec<f64>,
    scale: GridScale,
    origin: GridOrigin,
    lambda_max: f64,
}

impl LambdaGrid {
    /// 100 evenly spaced interior values of `(0, lambda_max)`.
    pub fn fine_100(lambda_max: f64) -> Result<Self> {
        Self::interior(lambda_max, 100, GridOrigin::Fine100)
    }

    /// 12 evenly spaced values of `[0, lambda_max]` with the first and last
    /// removed, leaving 10.
    pub fn coarse_12(lambda_max: f64) -> Result<Self> {
        Self::interior(lambda_max, 10, GridOrigin::Coarse12)
    }

    fn interior(lambda_max: f64, d: usize, origin: GridOrigin) -> Result<Self> {
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda_max must be positive, got {lambda_max}")));
        }
        let step = lambda_max / (d + 1) as f64;
        let values = (1..=d).rev().map(|i| step * i as f64).collect();
        Ok(LambdaGrid {
            values,
            scale: GridScale::Linear,
            origin,
            lambda_max,
        })
    }

    /// `d` log-spaced values from `lambda_max` down to `min_ratio * lambda_max`.
    pub fn log_spaced(lambda_max: f64, d: usize, min_ratio: f64) -> Result<Self> {
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda_max must be positive, got {lambda_max}")));
        }
        if d < 2 || !(min_ratio > 0.0 && min_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "log grid needs d >= 2 and min_ratio in (0,1), got {d}, {min_ratio}"
            )));
        }
        let hi = lambda_max.ln();
        let lo = (lambda_max * min_ratio).ln();
        let values = (0..d)
            .map(|i| (hi + (lo - hi) * i as f64 / (d - 1) as f64).exp())
            .collect();
        Ok(LambdaGrid {
            values,
            scale: GridScale::Log,
            origin: GridOrigin::Custom,
            lambda_max,
        })
    }

    /// Any set of positive values; sorted into decreasing order.
    pub fn custom(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty lambda grid".into()));
        }
        if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("lambda values must be positive and finite".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("lambda values must be distinct".into()));
        }
        let lambda_max = values[0];
        Ok(LambdaGrid {
            values,
            scale: GridScale::Linear,
            origin: GridOrigin::Custom,
            lambda_max,
        })
    }

    /// Grid from natural-log lambda points, e.g. the curve grid.
    pub fn from_log_lambda(log_lambda: &[f64]) -> Result<Self> {
        let mut g = Self::custom(log_lambda.iter().map(|v| v.exp()).collect())?;
        g.scale = GridScale::Log;
        Ok(g)
    }

    /// Every value multiplied by `factor`, e.g. to move between lambda
    /// conventions.
    pub fn scaled(&self, factor: f64) -> Self {
        LambdaGrid {
            values: self.values.iter().map(|v| v * factor).collect(),
            lambda_max: self.lambda_max * factor,
            ..self.clone()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self) -> GridScale {
        self.scale
    }

    pub fn origin(&self) -> GridOrigin {
        self.origin
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

/// A grid recipe resolved against each response's `lambda_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpec {
    Fine100,
    Coarse12,
    Log { d: usize, min_ratio: f64 },
}

impl GridSpec {
    pub fn build(&self, lambda_max: f64) -> Result<LambdaGrid> {
        match *self {
            GridSpec::Fine100 => LambdaGrid::fine_100(lambda_max),
            GridSpec::Coarse12 => LambdaGrid::coarse_12(lambda_max),
            GridSpec::Log { d, min_ratio } => LambdaGrid::log_spaced(lambda_max, d, min_ratio),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Fine100 => f.write_str("fine100"),
            GridSpec::Coarse12 => f.write_str("coarse12"),
            GridSpec::Log { d, min_ratio } => write!(f, "log:{d}:{min_ratio}"),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config("grid", format!("expected fine100|coarse12|log:<d>:<min_ratio>, got `{s}`"));
        match s {
            "fine100" => Ok(GridSpec::Fine100),
            "coarse12" => Ok(GridSpec::Coarse12),
            _ => {
                let rest = s.strip_prefix("log:").ok_or_else(bad)?;
                let (d, r) = rest.split_once(':').ok_or_else(bad)?;
                let d: usize = d.parse().map_err(|_| bad())?;
                let min_ratio: f64 = r.parse().map_err(|_| bad())?;
                if d < 2 || !(min_ratio > 0.0 && min_ratio < 1.0) {
                    return Err(bad());
                }
                Ok(GridSpec::Log { d, min_ratio })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_and_coarse_are_interior() {
        let f = LambdaGrid::fine_100(101.0).unwrap();
        assert_eq!(f.len(), 100);
        assert_eq!(f.values()[0], 100.0);
        assert_eq!(f.values()[99], 1.0);
        let c = LambdaGrid::coarse_12(11.0).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.values(), &[10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert!(c.values().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn log_grid_endpoints() {
        let g = LambdaGrid::log_spaced(2.0, 100, 1e-3).unwrap();
        assert_eq!(g.len(), 100);
        assert!((g.values()[0] - 2.0).abs() < 1e-12);
        assert!((g.values()[99] - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn parse_specs() {
        assert_eq!("fine100".parse::<GridSpec>().unwrap(), GridSpec::Fine100);
        assert_eq!(
            "log:50:0.001".parse::<GridSpec>().unwrap(),
            GridSpec::Log { d: 50, min_ratio: 0.001 }
        );
        for bad in ["fine", "log:1:0.5", "log:10:2", "log:x:0.1"] {
            let err = bad.parse::<GridSpec>().unwrap_err();
            assert!(err.to_string().contains("`grid`"), "{err}");
        }
    }

    #[test]
    fn custom_rejects_nonpositive() {
        assert!(LambdaGrid::custom(vec![1.0, 0.0]).is_err());
        assert!(LambdaGrid::custom(vec![1.0, 1.0]).is_err());
        assert!(LambdaGrid::fine_100(0.0).is_err());
    }
}
