//! Built-in expression ids for boundary data: `zero`, `cos_sum`,
//! `uniform`, and `gaussian_bump(center, width)` (periodized and
//! normalized to unit mass on the torus).

use crate::error::{MfgError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Zero,
    /// `sum_i cos(2 pi x_i)`.
    CosSum,
    /// Constant 1 (the uniform density).
    Uniform,
    /// Periodized isotropic Gaussian, normalized so the continuous
    /// integral over the torus is 1 in every dimension.
    GaussianBump { center: f64, width: f64 },
}

/// Number of periodic images summed on each side of the bump.
const PERIODIZATION_IMAGES: i32 = 6;

impl Expression {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expression::Zero => 0.0,
            Expression::Uniform => 1.0,
            Expression::CosSum => x
                .iter()
                .map(|xi| (2.0 * std::f64::consts::PI * xi).cos())
                .sum(),
            Expression::GaussianBump { center, width } => {
                let norm = 1.0 / (width * (2.0 * std::f64::consts::PI).sqrt());
                x.iter()
                    .map(|xi| {
                        let mut acc = 0.0;
                        for k in -PERIODIZATION_IMAGES..=PERIODIZATION_IMAGES {
                            let r = xi - center + k as f64;
                            acc += (-r * r / (2.0 * width * width)).exp();
                        }
                        norm * acc
                    })
                    .product()
            }
        }
    }

    /// Lipschitz constant (Euclidean, on the torus) of `amplitude * expr`
    /// in dimension `d`. Closed form for the trigonometric ids, sampled
    /// for the bump.
    pub fn lipschitz(&self, d: usize, amplitude: f64) -> f64 {
        let a = amplitude.abs();
        match self {
            Expression::Zero | Expression::Uniform => 0.0,
            Expression::CosSum => a * 2.0 * std::f64::consts::PI * (d as f64).sqrt(),
            Expression::GaussianBump { .. } => {
                // max 1-D slope by dense sampling; the product structure
                // bounds the gradient norm by sqrt(d) * slope * peak^(d-1)
                let samples = 4096;
                let mut max_slope = 0.0f64;
                let mut peak = 0.0f64;
                let h = 1.0 / samples as f64;
                for i in 0..samples {
                    let x0 = i as f64 * h;
                    let f0 = self.eval(&[x0]);
                    let f1 = self.eval(&[x0 + h]);
                    max_slope = max_slope.max(((f1 - f0) / h).abs());
                    peak = peak.max(f0);
                }
                a * (d as f64).sqrt() * max_slope * peak.powi(d as i32 - 1)
            }
        }
    }
}

/// Parse an expression id, e.g. `"cos_sum"` or `"gaussian_bump(0.5, 0.1)"`.
pub fn parse_expression(s: &str) -> Result<Expression> {
    let s = s.trim();
    match s {
        "zero" => return Ok(Expression::Zero),
        "cos_sum" => return Ok(Expression::CosSum),
        "uniform" => return Ok(Expression::Uniform),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("gaussian_bump") {
        let rest = rest.trim();
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| {
                MfgError::Config(format!("malformed gaussian_bump arguments in {s:?}"))
            })?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(MfgError::Config(format!(
                "gaussian_bump takes exactly two arguments (center, width), got {s:?}"
            )));
        }
        let center: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| MfgError::Config(format!("invalid center in {s:?}")))?;
        let width: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| MfgError::Config(format!("invalid width in {s:?}")))?;
        if !center.is_finite() || !(0.0..1.0).contains(&center) {
            return Err(MfgError::Config(format!(
                "gaussian_bump center must lie in [0,1), got {center}"
            )));
        }
        if !width.is_finite() || width <= 0.0 || width > 1.0 {
            return Err(MfgError::Config(format!(
                "gaussian_bump width must lie in (0,1], got {width}"
            )));
        }
        return Ok(Expression::GaussianBump { center, width });
    }
    Err(MfgError::Config(format!("unknown expression id {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_known_ids() {
        assert_eq!(parse_expression("zero").unwrap(), Expression::Zero);
        assert_eq!(parse_expression(" cos_sum ").unwrap(), Expression::CosSum);
        assert_eq!(parse_expression("uniform").unwrap(), Expression::Uniform);
        assert_eq!(
            parse_expression("gaussian_bump(0.5, 0.1)").unwrap(),
            Expression::GaussianBump { center: 0.5, width: 0.1 }
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in [
            "",
            "coss_sum",
            "gaussian_bump",
            "gaussian_bump(0.5)",
            "gaussian_bump(0.5, 0.1, 2)",
            "gaussian_bump(nope, 0.1)",
            "gaussian_bump(0.5, -0.1)",
            "gaussian_bump(1.5, 0.1)",
            "gaussian_bump(0.5, inf)",
        ] {
            assert!(parse_expression(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn bump_is_normalized_and_positive() {
        let e = Expression::GaussianBump { center: 0.3, width: 0.08 };
        let n = 2048;
        let mut mass = 0.0;
        for i in 0..n {
            let x = i as f64 / n as f64;
            let v = e.eval(&[x]);
            assert!(v >= 0.0);
            mass += v / n as f64;
        }
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bump_is_periodic() {
        let e = Expression::GaussianBump { center: 0.1, width: 0.05 };
        assert!((e.eval(&[0.0]) - e.eval(&[1.0])).abs() < 1e-12);
    }

    #[test]
    fn cos_sum_lipschitz_constant() {
        let e = Expression::CosSum;
        assert!((e.lipschitz(1, 1.0) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!(
            (e.lipschitz(2, 0.5) - 0.5 * 2.0 * std::f64::consts::PI * 2.0f64.sqrt()).abs()
                < 1e-14
        );
    }

    #[test]
    fn bump_lipschitz_dominates_sampled_slopes() {
        let e = Expression::GaussianBump { center: 0.5, width: 0.1 };
        let l = e.lipschitz(1, 1.0);
        let n = 1000;
        for i in 0..n {
            let x0 = i as f64 / n as f64;
            let x1 = x0 + 0.5 / n as f64;
            let slope = (e.eval(&[x1]) - e.eval(&[x0])).abs() / (0.5 / n as f64);
            assert!(slope <= l * (1.0 + 1e-6));
        }
    }
}
