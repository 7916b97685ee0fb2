use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Panel maximum for the red channel, µmol/m²s.
pub const MAX_RED_PPFD: f64 = 200.0;
/// Panel maximum for the blue channel, µmol/m²s.
pub const MAX_BLUE_PPFD: f64 = 100.0;

pub const FEATURE_COUNT: usize = 5;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["red_ppfd", "blue_ppfd", "ec", "ph", "t_days"];

/// Inputs of the growth exponent: window-averaged light, nutrient state and plant age.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GrowthFeatures<T> {
    /// µmol/m²s
    pub red_ppfd: T,
    /// µmol/m²s
    pub blue_ppfd: T,
    /// µS/cm
    pub ec: T,
    pub ph: T,
    /// days since transplant
    pub t_days: T,
}

impl<T: Scalar> GrowthFeatures<T> {
    pub fn new(red_ppfd: T, blue_ppfd: T, ec: T, ph: T, t_days: T) -> Self {
        Self { red_ppfd, blue_ppfd, ec, ph, t_days }
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |x: T, hi: f64| x >= T::zero() && x <= T::lit(hi);
        if !in_range(self.red_ppfd, MAX_RED_PPFD) {
            return Err(Error::Validation(format!("red PPFD {} outside [0, 200]", self.red_ppfd)));
        }
        if !in_range(self.blue_ppfd, MAX_BLUE_PPFD) {
            return Err(Error::Validation(format!("blue PPFD {} outside [0, 100]", self.blue_ppfd)));
        }
        if !(self.ec > T::zero()) {
            return Err(Error::Validation(format!("EC must be positive, got {}", self.ec)));
        }
        if !(self.ph > T::zero() && self.ph < T::lit(14.0)) {
            return Err(Error::Validation(format!("pH {} outside (0, 14)", self.ph)));
        }
        if !(self.t_days >= T::zero()) {
            return Err(Error::Validation(format!("plant age must be >= 0, got {}", self.t_days)));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [T; FEATURE_COUNT] {
        [self.red_ppfd, self.blue_ppfd, self.ec, self.ph, self.t_days]
    }
}

/// Per-feature `(min, max)` bounds for min-max scaling, in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NormalizationRanges<T> {
    pub bounds: [(T, T); FEATURE_COUNT],
}

impl<T: Scalar> Default for NormalizationRanges<T> {
    fn default() -> Self {
        let b = |lo: f64, hi: f64| (T::lit(lo), T::lit(hi));
        Self { bounds: [b(0.0, MAX_RED_PPFD), b(0.0, MAX_BLUE_PPFD), b(1600.0, 2000.0), b(6.4, 6.7), b(0.0, 15.0)] }
    }
}

impl<T: Scalar> NormalizationRanges<T> {
    pub fn new(bounds: [(T, T); FEATURE_COUNT]) -> Result<Self> {
        let r = Self { bounds };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, &(lo, hi)) in FEATURE_NAMES.iter().zip(&self.bounds) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!(
                    "normalization range for {name} must satisfy min < max, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    /// Min-max scales without validating; callers hold a validated range.
    pub(crate) fn scale(&self, f: &GrowthFeatures<T>) -> [T; FEATURE_COUNT] {
        let raw = f.to_array();
        let mut out = [T::zero(); FEATURE_COUNT];
        for (o, (&x, &(lo, hi))) in out.iter_mut().zip(raw.iter().zip(&self.bounds)) {
            *o = ((x - lo) / (hi - lo)).max(T::zero()).min(T::one());
        }
        out
    }

    /// Names of features lying outside their range (the model would be extrapolating).
    pub fn out_of_range(&self, f: &GrowthFeatures<T>) -> Vec<&'static str> {
        f.to_array()
            .iter()
            .zip(&self.bounds)
            .zip(FEATURE_NAMES)
            .filter(|((&x, &(lo, hi)), _)| x < lo || x > hi)
            .map(|(_, name)| name)
            .collect()
    }
}

/// Min-max scales every feature into `[0, 1]`, clamping values outside the range.
pub fn normalize_features<T: Scalar>(
    features: &GrowthFeatures<T>,
    ranges: &NormalizationRanges<T>,
) -> Result<[T; FEATURE_COUNT]> {
    ranges.validate()?;
    Ok(ranges.scale(features))
}

/// A training observation: features over a window of `delta_t_hours`, with mean leaf
/// area at the window start and end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GrowthSample<T> {
    pub features: GrowthFeatures<T>,
    pub delta_t_hours: T,
    /// cm²
    pub leaf_area_start: T,
    /// cm²
    pub leaf_area_end: T,
}

impl<T: Scalar> GrowthSample<T> {
    pub fn new(features: GrowthFeatures<T>, delta_t_hours: T, leaf_area_start: T, leaf_area_end: T) -> Result<Self> {
        if !(delta_t_hours > T::zero()) {
            return Err(Error::Validation(format!("window length must be positive, got {delta_t_hours}")));
        }
        if !(leaf_area_end > leaf_area_start) {
            return Err(Error::Validation(format!(
                "leaf area must increase over the window ({leaf_area_start} -> {leaf_area_end})"
            )));
        }
        Ok(Self { features, delta_t_hours, leaf_area_start, leaf_area_end })
    }

    /// Growth exponent the model is trained on: `ln(L2 − L1) / Δt`, per hour.
    pub fn target(&self) -> T {
        (self.leaf_area_end - self.leaf_area_start).ln() / self.delta_t_hours
    }
}
