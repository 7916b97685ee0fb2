//! Leaf-area growth law, its regressors and the light sensitivity analysis.
//!
//! The model predicts an hourly growth exponent `f`; over a window of `Δt` hours the
//! leaf area grows by `exp(f · Δt)` cm².

mod features;
mod linear;
mod metrics;
mod model;
pub mod network;
mod sensitivity;
mod synthetic;

pub use features::{
    normalize_features, GrowthFeatures, GrowthSample, NormalizationRanges, FEATURE_COUNT, FEATURE_NAMES, MAX_BLUE_PPFD,
    MAX_RED_PPFD,
};
pub use linear::fit_linear;
pub use metrics::{evaluate, evaluate_exponent, regression_metrics, FitMetrics};
pub use model::{model_forward, predict_leaf_increase, GrowthModel, GrowthRate, Hyperparameters, ModelKind};
pub use network::{fit_neural, Layout, NeuralFit};
pub use sensitivity::{sensitivity_grid, SensitivityGrid};
pub use synthetic::{synthetic_samples, SampleBox, SyntheticGrowth};
