//! Univariate standard normal helpers.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-x * FRAC_1_SQRT_2)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        INV_SQRT_2PI * (-0.5 * x * x).exp()
    }
}

/// Standard normal quantile; `p` is clamped into the open unit interval.
pub fn normal_quantile(p: f64) -> f64 {
    let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// `P[a < Z < b]`, evaluated on whichever tail avoids cancellation.
pub fn normal_interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a > 0.0 {
        (normal_cdf(-a) - normal_cdf(-b)).max(0.0)
    } else {
        (normal_cdf(b) - normal_cdf(a)).max(0.0)
    }
}

/// Mean of a standard normal truncated to `(a, b)`.
pub(crate) fn truncated_mean(a: f64, b: f64) -> f64 {
    let mass = normal_interval(a, b);
    if mass < 1e-300 {
        return if a > 0.0 {
            a
        } else if b < 0.0 {
            b
        } else {
            0.0
        };
    }
    (normal_pdf(a) - normal_pdf(b)) / mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(normal_cdf(1.96), 0.975_002_104_851_779_6, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(-3.0), 0.001_349_898_031_630_094_6, epsilon = 1e-17);
        assert_abs_diff_eq!(normal_quantile(0.975), 1.959_963_984_540_054, epsilon = 1e-12);
        assert_abs_diff_eq!(normal_interval(8.0, 9.0), 6.219_831_985_865_83e-16, epsilon = 1e-28);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &x in &[-6.0, -2.5, -0.3, 0.0, 0.7, 3.1, 5.5] {
            assert_abs_diff_eq!(normal_quantile(normal_cdf(x)), x, epsilon = 1e-9);
        }
    }
}
