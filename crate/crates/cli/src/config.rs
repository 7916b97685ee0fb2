use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use growlight::growth::{Hyperparameters, SyntheticGrowth};
use growlight::optimizer::{GaParams, ProfitSettings};
use growlight::segmentation::SegmentConfig;
use growlight::simulation::{GrowthConditions, DEFAULT_HORIZON};
use serde::Deserialize;

use crate::input_error;

/// Input locations. Relative paths resolve against the config file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub dataset: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub tariff: Option<PathBuf>,
    pub power: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Everything a command may read from `--config`. Command-line flags win over these.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub seed: u64,
    pub horizon: usize,
    pub delta_t_hours: f64,
    pub profit: ProfitSettings<f64>,
    pub conditions: GrowthConditions<f64>,
    pub ga: GaParams,
    pub training: Hyperparameters,
    pub segment: SegmentConfig,
    /// Pot centres in rectified pixel coordinates.
    pub pots: Vec<(f64, f64)>,
    /// Generator behind `--model synthetic`.
    pub synthetic: SyntheticGrowth,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            paths: Paths::default(),
            seed: 0,
            horizon: DEFAULT_HORIZON,
            delta_t_hours: 24.0,
            profit: ProfitSettings::default(),
            conditions: GrowthConditions::default(),
            ga: GaParams::default(),
            training: Hyperparameters::default(),
            segment: SegmentConfig::default(),
            pots: Vec::new(),
            synthetic: SyntheticGrowth::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| input_error(format!("cannot read config {}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| input_error(format!("invalid config {}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let p = &mut cfg.paths;
        for slot in [&mut p.dataset, &mut p.model, &mut p.tariff, &mut p.power, &mut p.annotations, &mut p.out] {
            if let Some(rel) = slot.as_mut() {
                if rel.is_relative() {
                    *rel = base.join(&*rel);
                }
            }
        }
        for f in [&p.dataset, &p.model, &p.tariff, &p.power, &p.annotations].into_iter().flatten() {
            // "synthetic" names the built-in generator rather than a file
            if f.file_name().is_some_and(|n| n == "synthetic") {
                continue;
            }
            if !f.exists() {
                return Err(input_error(format!("{} (referenced by {}) does not exist", f.display(), path.display())));
            }
        }
        Ok(cfg)
    }
}
