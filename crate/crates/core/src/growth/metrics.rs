use serde::{Deserialize, Serialize};

use super::features::GrowthSample;
use super::model::{predict_leaf_increase, GrowthRate};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FitMetrics<T> {
    /// cm⁴ when computed on leaf areas
    pub mse: T,
    pub r_squared: T,
}

/// MSE and coefficient of determination of `predicted` against `actual`.
pub fn regression_metrics<T: Scalar>(actual: &[T], predicted: &[T]) -> Result<FitMetrics<T>> {
    if actual.is_empty() || actual.len() != predicted.len() {
        return Err(Error::Metrics(format!(
            "need equally sized non-empty series, got {} actual and {} predicted",
            actual.len(),
            predicted.len()
        )));
    }
    let n = T::from_usize_lossy(actual.len());
    let mean = actual.iter().copied().sum::<T>() / n;
    let ss_res: T = actual.iter().zip(predicted).map(|(&a, &p)| (a - p) * (a - p)).sum();
    let ss_tot: T = actual.iter().map(|&a| (a - mean) * (a - mean)).sum();
    if ss_tot == T::zero() {
        return Err(Error::Metrics("actual values have zero variance; R² is undefined".into()));
    }
    Ok(FitMetrics { mse: ss_res / n, r_squared: T::one() - ss_res / ss_tot })
}

/// Scores a model on predicted end-of-window leaf area `L1 + ΔL` against the observed `L2`.
pub fn evaluate<T: Scalar, M: GrowthRate<T> + ?Sized>(model: &M, data: &[GrowthSample<T>]) -> Result<FitMetrics<T>> {
    let actual: Vec<T> = data.iter().map(|s| s.leaf_area_end).collect();
    let predicted = data
        .iter()
        .map(|s| Ok(s.leaf_area_start + predict_leaf_increase(model, &s.features, s.delta_t_hours)?))
        .collect::<Result<Vec<T>>>()?;
    regression_metrics(&actual, &predicted)
}

/// Scores a model directly on the growth exponent `ln(L2 − L1)/Δt`.
pub fn evaluate_exponent<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    data: &[GrowthSample<T>],
) -> Result<FitMetrics<T>> {
    let actual: Vec<T> = data.iter().map(|s| s.target()).collect();
    let predicted: Vec<T> = data.iter().map(|s| model.growth_exponent(&s.features)).collect();
    regression_metrics(&actual, &predicted)
}
