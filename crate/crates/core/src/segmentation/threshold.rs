use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::Scalar;

/// Maximum plant-cluster distance from the pot centre, `scale · exp(rate · t)` pixels at
/// plant age `t` days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ThresholdRule<T> {
    pub scale: T,
    pub rate: T,
}

impl<T: Scalar> ThresholdRule<T> {
    pub fn new(scale: T, rate: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() || !rate.is_finite() {
            return Err(Error::Validation("threshold scale must be positive and rate finite".into()));
        }
        Ok(Self { scale, rate })
    }

    pub fn threshold(&self, t_days: T) -> T {
        self.scale * (self.rate * t_days).exp()
    }
}

/// Least-squares fit of `ln d = ln scale + rate · t` to `(t_days, distance)` pairs.
pub fn fit_threshold_rule<T: Scalar>(samples: &[(T, T)]) -> Result<ThresholdRule<T>> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 samples, got {}", samples.len())));
    }
    if let Some((t, d)) = samples.iter().find(|(t, d)| !(*d > T::zero()) || !t.is_finite() || !d.is_finite()) {
        return Err(Error::Fit(format!("distance must be positive and finite, got ({t:?}, {d:?})")));
    }
    let a: Vec<T> = samples.iter().flat_map(|(t, _)| [*t, T::one()]).collect();
    let b: Vec<T> = samples.iter().map(|(_, d)| d.ln()).collect();
    let x =
        least_squares(&a, samples.len(), 2, &b).map_err(|_| Error::Fit("sample ages must not all be equal".into()))?;
    ThresholdRule::new(x[1].exp(), x[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let s: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 3.0 * (0.2 * i as f64).exp())).collect();
        let r = fit_threshold_rule(&s).unwrap();
        assert!((r.scale - 3.0).abs() < 1e-10 && (r.rate - 0.2).abs() < 1e-12);
        assert!((r.threshold(2.5) - 3.0 * 0.5f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(fit_threshold_rule(&[(1.0f64, 2.0)]).is_err());
        assert!(fit_threshold_rule(&[(1.0f64, 2.0), (1.0, 3.0)]).is_err());
        assert!(fit_threshold_rule(&[(1.0f64, 2.0), (2.0, 0.0)]).is_err());
    }
}
