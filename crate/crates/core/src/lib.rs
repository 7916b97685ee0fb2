//! Grow-light schedule optimization.
//!
//! The crate covers the whole planning pipeline for an LED-lit hydroponic bed:
//!
//! * [`segmentation`] extracts per-pot leaf area from top-view images,
//! * [`dataset`] turns sensor and leaf-area records into training windows,
//! * [`growth`] fits the hourly leaf-area growth law to those windows,
//! * [`economics`] prices a lighting schedule under a time-of-use tariff,
//! * [`simulation`] rolls schedules through a growth model,
//! * [`optimizer`] searches for the most profitable schedule with a genetic algorithm.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases below
//! pin the double-precision instantiation used by the command-line tool.

// `!(x > 0)` is used on purpose throughout so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod economics;
mod error;
pub mod growth;
pub mod linalg;
pub mod optimizer;
mod scalar;
pub mod segmentation;
pub mod simulation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type GrowthModel64 = growth::GrowthModel<f64>;
pub type GrowthModel32 = growth::GrowthModel<f32>;
pub type GrowthSample64 = growth::GrowthSample<f64>;
pub type GrowthFeatures64 = growth::GrowthFeatures<f64>;
pub type NormalizationRanges64 = growth::NormalizationRanges<f64>;
pub type PowerModel64 = economics::PowerModel<f64>;
pub type TariffPlan64 = economics::TariffPlan<f64>;
pub type SimulationResult64 = simulation::SimulationResult<f64>;
pub type ComparisonReport64 = simulation::ComparisonReport<f64>;
pub type GrowthConditions64 = simulation::GrowthConditions<f64>;
pub type ProfitSettings64 = optimizer::ProfitSettings<f64>;
pub type Homography64 = segmentation::Homography<f64>;
pub type ThresholdRule64 = segmentation::ThresholdRule<f64>;
