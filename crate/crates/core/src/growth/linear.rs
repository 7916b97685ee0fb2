use super::features::{GrowthSample, NormalizationRanges, FEATURE_COUNT};
use super::model::{GrowthModel, LINEAR_PARAM_COUNT};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::Scalar;

/// Ordinary least squares of the growth exponent on the normalized features plus an
/// intercept. Solved by QR rather than the normal equations.
pub fn fit_linear<T: Scalar>(samples: &[GrowthSample<T>], ranges: NormalizationRanges<T>) -> Result<GrowthModel<T>> {
    ranges.validate()?;
    if samples.len() < LINEAR_PARAM_COUNT {
        return Err(Error::Fit(format!(
            "linear regression needs at least {LINEAR_PARAM_COUNT} samples, got {}",
            samples.len()
        )));
    }
    let mut design = Vec::with_capacity(samples.len() * LINEAR_PARAM_COUNT);
    let mut targets = Vec::with_capacity(samples.len());
    for s in samples {
        design.extend_from_slice(&ranges.scale(&s.features));
        design.push(T::one());
        targets.push(s.target());
    }
    debug_assert_eq!(design.len(), samples.len() * (FEATURE_COUNT + 1));
    let coefficients = least_squares(&design, samples.len(), LINEAR_PARAM_COUNT, &targets)?;
    GrowthModel::linear(coefficients, ranges)
}
