//! Composite Newton–Cotes rules on uniformly spaced samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    /// Needs an odd number of samples.
    #[default]
    Simpson,
}

/// Integrates samples `values` spaced `h` apart.
pub fn integrate(values: &[f64], h: f64, rule: QuadratureRule) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput("quadrature needs at least two samples".into()));
    }
    match rule {
        QuadratureRule::Trapezoid => {
            let inner: f64 = values[1..n - 1].iter().sum();
            Ok(h * (0.5 * (values[0] + values[n - 1]) + inner))
        }
        QuadratureRule::Simpson => {
            if n % 2 == 0 {
                return Err(Error::InvalidInput(format!(
                    "Simpson's rule needs an odd sample count, got {n}"
                )));
            }
            let mut acc = values[0] + values[n - 1];
            for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            Ok(acc * h / 3.0)
        }
    }
}
