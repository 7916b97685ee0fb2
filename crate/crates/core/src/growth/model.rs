use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{GrowthFeatures, NormalizationRanges, FEATURE_COUNT};
use super::network::Layout;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Anything that yields the hourly growth exponent `f` for a feature vector.
///
/// Implemented by trained [`GrowthModel`]s and by the analytic
/// [`SyntheticGrowth`](super::SyntheticGrowth) generator, so simulation and the
/// optimizer work with either.
pub trait GrowthRate<T: Scalar>: Sync {
    /// `f(red, blue, EC, pH, t)` in ln(cm²) per hour.
    fn growth_exponent(&self, features: &GrowthFeatures<T>) -> T;

    /// Feature region the model was built for; used to flag extrapolation.
    fn ranges(&self) -> NormalizationRanges<T>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Linear,
    Neural,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    pub hidden: [usize; 2],
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            hidden: [16, 16],
            dropout: 0.5,
            epochs: 2000,
            batch_size: 32,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if self.hidden.contains(&0) {
            return Err(Error::Config("hidden layer widths must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout must lie in [0, 1), got {}", self.dropout)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.epsilon > 0.0) {
            return Err(Error::Config("Adam moment coefficients must lie in [0, 1) with epsilon > 0".into()));
        }
        Ok(())
    }
}

/// Trained regressor for the growth exponent.
///
/// Linear parameters are `[w_red, w_blue, w_ec, w_ph, w_t, intercept]` on normalized
/// features. Neural parameters are laid out as `W1, b1, W2, b2, w3, b3` with row-major
/// weight matrices (see [`Layout`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GrowthModel<T> {
    pub kind: ModelKind,
    pub hyperparameters: Hyperparameters,
    pub normalization: NormalizationRanges<T>,
    pub parameters: Vec<T>,
}

pub const LINEAR_PARAM_COUNT: usize = FEATURE_COUNT + 1;

impl<T: Scalar> GrowthModel<T> {
    pub fn linear(coefficients: Vec<T>, normalization: NormalizationRanges<T>) -> Result<Self> {
        let m = Self {
            kind: ModelKind::Linear,
            hyperparameters: Hyperparameters::default(),
            normalization,
            parameters: coefficients,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn neural(
        parameters: Vec<T>,
        normalization: NormalizationRanges<T>,
        hyperparameters: Hyperparameters,
    ) -> Result<Self> {
        let m = Self { kind: ModelKind::Neural, hyperparameters, normalization, parameters };
        m.validate()?;
        Ok(m)
    }

    pub fn expected_param_count(&self) -> usize {
        match self.kind {
            ModelKind::Linear => LINEAR_PARAM_COUNT,
            ModelKind::Neural => self.layout().param_count(),
        }
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(self.hyperparameters.hidden)
    }

    pub fn validate(&self) -> Result<()> {
        self.normalization.validate()?;
        if self.kind == ModelKind::Neural {
            self.hyperparameters.validate()?;
        }
        let expected = self.expected_param_count();
        if self.parameters.len() != expected {
            return Err(Error::Config(format!(
                "{:?} model declares {} parameters but carries {}",
                self.kind,
                expected,
                self.parameters.len()
            )));
        }
        if let Some(i) = self.parameters.iter().position(|p| !p.is_finite()) {
            return Err(Error::Config(format!("parameter {i} is not finite")));
        }
        Ok(())
    }

    /// Inference pass. Dropout is never applied here.
    pub fn forward(&self, features: &GrowthFeatures<T>) -> T {
        let x = self.normalization.scale(features);
        match self.kind {
            ModelKind::Linear => {
                let (w, b) = self.parameters.split_at(FEATURE_COUNT);
                x.iter().zip(w).map(|(&xi, &wi)| xi * wi).sum::<T>() + b[0]
            }
            ModelKind::Neural => self.layout().forward(&self.parameters, &x),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl<T: Scalar> GrowthRate<T> for GrowthModel<T> {
    fn growth_exponent(&self, features: &GrowthFeatures<T>) -> T {
        self.forward(features)
    }

    fn ranges(&self) -> NormalizationRanges<T> {
        self.normalization
    }
}

/// The hourly growth exponent of `model` at `features`.
pub fn model_forward<T: Scalar, M: GrowthRate<T> + ?Sized>(model: &M, features: &GrowthFeatures<T>) -> T {
    model.growth_exponent(features)
}

/// Leaf area gained over `delta_t_hours`: `exp(f · Δt)`.
pub fn predict_leaf_increase<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    features: &GrowthFeatures<T>,
    delta_t_hours: T,
) -> Result<T> {
    if !(delta_t_hours > T::zero()) {
        return Err(Error::Validation(format!("window length must be positive, got {delta_t_hours}")));
    }
    Ok((model.growth_exponent(features) * delta_t_hours).exp())
}
