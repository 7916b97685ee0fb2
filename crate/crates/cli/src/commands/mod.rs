use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use growlight::economics::{PowerModel, TariffPlan};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::RunConfig;
use crate::input_error;
use crate::model::ModelSource;

pub mod data;
pub mod optimize;
pub mod segment;
pub mod sensitivity;
pub mod simulate;
pub mod train;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
}

impl Ctx {
    pub fn out_path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)
            .with_context(|| input_error(format!("cannot create output directory {}", self.out.display())))?;
        Ok(self.out.join(name))
    }

    pub fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.out_path(name)?;
        let f = File::create(&path).with_context(|| input_error(format!("cannot write {}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    pub fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn model(&self, flag: Option<&Path>) -> Result<ModelSource> {
        let path = flag
            .or(self.cfg.paths.model.as_deref())
            .ok_or_else(|| input_error("no model given; pass --model <FILE|synthetic>"))?;
        ModelSource::open(path, &self.cfg.synthetic)
    }

    pub fn tariff(&self, flag: Option<&Path>) -> Result<TariffPlan<f64>> {
        match flag.or(self.cfg.paths.tariff.as_deref()) {
            Some(p) => read_json(p),
            None => Ok(TariffPlan::tepco()),
        }
    }

    pub fn power(&self, flag: Option<&Path>) -> Result<PowerModel<f64>> {
        match flag.or(self.cfg.paths.power.as_deref()) {
            Some(p) => {
                let pm: PowerModel<f64> = read_json(p)?;
                pm.validate().with_context(|| p.display().to_string())?;
                Ok(pm)
            }
            None => Ok(PowerModel::default()),
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| input_error(format!("cannot read {}", path.display())))?;
    serde_json::from_str(&text).with_context(|| input_error(format!("invalid JSON in {}", path.display())))
}

/// Growth and economics overrides shared by `optimize` and `simulate`.
#[derive(Debug, Args)]
pub struct EconomicsArgs {
    /// Growth model file, or `synthetic` for the built-in generator.
    #[arg(long, value_name = "FILE|synthetic")]
    pub model: Option<PathBuf>,
    /// Schedule length in hours.
    #[arg(long, visible_alias = "H")]
    pub horizon: Option<usize>,
    /// Sale price, cents per cm² of leaf.
    #[arg(long, visible_alias = "P")]
    pub price: Option<f64>,
    /// Plants under one panel.
    #[arg(long, visible_alias = "n")]
    pub plants: Option<usize>,
    /// Starting leaf area, cm².
    #[arg(long, visible_alias = "L0")]
    pub initial_area: Option<f64>,
    /// Nutrient EC, µS/cm.
    #[arg(long)]
    pub ec: Option<f64>,
    #[arg(long)]
    pub ph: Option<f64>,
    /// Tariff plan JSON (default: TEPCO time-of-use).
    #[arg(long, value_name = "FILE")]
    pub tariff: Option<PathBuf>,
    /// Power model JSON.
    #[arg(long, value_name = "FILE")]
    pub power: Option<PathBuf>,
}

impl EconomicsArgs {
    /// Config with the flags applied.
    pub fn apply(&self, cfg: &RunConfig) -> RunConfig {
        let mut c = cfg.clone();
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        if let Some(p) = self.price {
            c.profit.price_per_area = p;
        }
        if let Some(n) = self.plants {
            c.profit.plants_per_panel = n;
        }
        if let Some(l) = self.initial_area {
            c.conditions.initial_leaf_area = l;
        }
        if let Some(ec) = self.ec {
            c.conditions.ec = ec;
        }
        if let Some(ph) = self.ph {
            c.conditions.ph = ph;
        }
        c
    }
}
