use std::path::Path;

use anyhow::{Context, Result};
use growlight::growth::{GrowthFeatures, GrowthModel, GrowthRate, NormalizationRanges, SyntheticGrowth};

/// A trained model file, or the built-in synthetic generator.
pub enum ModelSource {
    Trained(GrowthModel<f64>),
    Synthetic(SyntheticGrowth),
}

impl ModelSource {
    pub fn open(source: &Path, synthetic: &SyntheticGrowth) -> Result<Self> {
        if source.as_os_str() == "synthetic" || source.file_name().is_some_and(|n| n == "synthetic") {
            return Ok(Self::Synthetic(synthetic.clone()));
        }
        let model = GrowthModel::load(source).with_context(|| format!("loading model {}", source.display()))?;
        Ok(Self::Trained(model))
    }
}

impl GrowthRate<f64> for ModelSource {
    fn growth_exponent(&self, f: &GrowthFeatures<f64>) -> f64 {
        match self {
            Self::Trained(m) => m.growth_exponent(f),
            Self::Synthetic(g) => g.growth_exponent(f),
        }
    }

    fn ranges(&self) -> NormalizationRanges<f64> {
        match self {
            Self::Trained(m) => GrowthRate::<f64>::ranges(m),
            Self::Synthetic(g) => GrowthRate::<f64>::ranges(g),
        }
    }
}
