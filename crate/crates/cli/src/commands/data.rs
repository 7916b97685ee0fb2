use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use growlight::dataset::{
    load_runs, save_runs, split_train_test, synthetic_run, preset_runs, ExperimentRun, SyntheticRunConfig,
};
use growlight::growth::{GrowthFeatures, GrowthSample};
use serde::{Deserialize, Serialize};

use super::Ctx;
use crate::input_error;

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Run file, or directory of run files.
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    pub runs: Option<PathBuf>,
    /// Generate the four preset runs from the synthetic generator instead of reading files.
    #[arg(long)]
    pub synthetic: bool,
    /// Length of generated runs in days.
    #[arg(long, default_value_t = 15, requires = "synthetic")]
    pub days: u32,
    /// Window length in hours.
    #[arg(long)]
    pub delta_t: Option<f64>,
}

/// One sample per row of `train.csv` / `test.csv`.
#[derive(Debug, Serialize, Deserialize)]
struct SampleRow {
    red_ppfd: f64,
    blue_ppfd: f64,
    ec: f64,
    ph: f64,
    t_days: f64,
    delta_t_hours: f64,
    leaf_area_start: f64,
    leaf_area_end: f64,
}

pub fn write_samples(ctx: &Ctx, name: &str, samples: &[GrowthSample<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(ctx.create(name)?);
    for s in samples {
        let f = s.features;
        w.serialize(SampleRow {
            red_ppfd: f.red_ppfd,
            blue_ppfd: f.blue_ppfd,
            ec: f.ec,
            ph: f.ph,
            t_days: f.t_days,
            delta_t_hours: s.delta_t_hours,
            leaf_area_start: s.leaf_area_start,
            leaf_area_end: s.leaf_area_end,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(path: &Path) -> Result<Vec<GrowthSample<f64>>> {
    let file = File::open(path).with_context(|| input_error(format!("cannot read {}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in csv::Reader::from_reader(file).deserialize::<SampleRow>().enumerate() {
        let at = || input_error(format!("{} line {}", path.display(), i + 2));
        let r = row.with_context(at)?;
        let f = GrowthFeatures::new(r.red_ppfd, r.blue_ppfd, r.ec, r.ph, r.t_days);
        out.push(GrowthSample::new(f, r.delta_t_hours, r.leaf_area_start, r.leaf_area_end).with_context(at)?);
    }
    Ok(out)
}

/// Runs from `--runs`, the configured dataset path, or nothing.
pub fn load_configured_runs(ctx: &Ctx, flag: Option<&Path>) -> Result<Option<Vec<ExperimentRun>>> {
    match flag.or(ctx.cfg.paths.dataset.as_deref()) {
        Some(p) => {
            let runs = load_runs(p).with_context(|| input_error(format!("loading runs from {}", p.display())))?;
            Ok(Some(runs))
        }
        None => Ok(None),
    }
}

pub fn run(ctx: &Ctx, args: BuildDatasetArgs) -> Result<()> {
    let delta_t = args.delta_t.unwrap_or(ctx.cfg.delta_t_hours);
    let runs = if args.synthetic {
        let cfg = SyntheticRunConfig { days: args.days, seed: ctx.cfg.seed, ..Default::default() };
        let runs = preset_runs()
            .iter()
            .map(|t| synthetic_run(t, &ctx.cfg.synthetic, &cfg))
            .collect::<growlight::Result<Vec<_>>>()?;
        let dir = ctx.out_path("runs")?;
        save_runs(&dir, &runs).with_context(|| format!("writing runs to {}", dir.display()))?;
        runs
    } else {
        load_configured_runs(ctx, args.runs.as_deref())?
            .ok_or_else(|| input_error("no runs given; pass --runs <PATH> or --synthetic"))?
    };
    let split = split_train_test::<f64>(&runs, delta_t).context(input_error("building samples"))?;
    write_samples(ctx, "train.csv", &split.train)?;
    write_samples(ctx, "test.csv", &split.test)?;
    println!("train_samples {}", split.train.len());
    println!("test_samples {}", split.test.len());
    println!("dropped_windows {}", split.dropped);
    Ok(())
}
