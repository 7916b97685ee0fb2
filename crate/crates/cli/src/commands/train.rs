use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use growlight::dataset::split_train_test;
use growlight::growth::{
    evaluate, fit_linear, fit_neural, synthetic_samples, FitMetrics, GrowthSample, NormalizationRanges, SampleBox,
};
use serde::Serialize;

use super::data::{load_configured_runs, read_samples};
use super::Ctx;
use crate::{input_error, plot};

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Directory holding `train.csv` and `test.csv` from build-dataset.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["runs", "synthetic"])]
    pub samples: Option<PathBuf>,
    /// Run file or directory; windows are cut with --delta-t.
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    pub runs: Option<PathBuf>,
    /// Draw this many one-hour samples from the synthetic generator, 80% for training.
    #[arg(long, value_name = "N")]
    pub synthetic: Option<usize>,
    #[arg(long)]
    pub delta_t: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Report {
    train_samples: usize,
    test_samples: usize,
    linear_train: FitMetrics<f64>,
    linear_test: FitMetrics<f64>,
    neural_train: FitMetrics<f64>,
    neural_test: FitMetrics<f64>,
}

type Split = (Vec<GrowthSample<f64>>, Vec<GrowthSample<f64>>);

fn load(ctx: &Ctx, args: &TrainArgs) -> Result<Split> {
    if let Some(dir) = &args.samples {
        return Ok((read_samples(&dir.join("train.csv"))?, read_samples(&dir.join("test.csv"))?));
    }
    if let Some(n) = args.synthetic {
        let mut all = synthetic_samples(&ctx.cfg.synthetic, &SampleBox::default(), n, ctx.cfg.seed);
        let test = all.split_off(n * 4 / 5);
        return Ok((all, test));
    }
    let runs = load_configured_runs(ctx, args.runs.as_deref())?
        .ok_or_else(|| input_error("no training data; pass --samples, --runs or --synthetic"))?;
    let split = split_train_test::<f64>(&runs, args.delta_t.unwrap_or(ctx.cfg.delta_t_hours))
        .context(input_error("building samples"))?;
    Ok((split.train, split.test))
}

pub fn run(ctx: &Ctx, args: TrainArgs) -> Result<()> {
    let (train, test) = load(ctx, &args)?;
    if train.is_empty() {
        return Err(input_error("training set is empty"));
    }
    if test.is_empty() {
        return Err(input_error("test set is empty"));
    }
    let mut hyper = ctx.cfg.training.clone();
    if let Some(e) = args.epochs {
        hyper.epochs = e;
    }
    let ranges = NormalizationRanges::default();
    let linear = fit_linear(&train, ranges)?;
    let neural = fit_neural(&train, ranges, &hyper)?;
    linear.save(ctx.out_path("linear_model.json")?)?;
    neural.model.save(ctx.out_path("neural_model.json")?)?;

    let report = Report {
        train_samples: train.len(),
        test_samples: test.len(),
        linear_train: evaluate(&linear, &train)?,
        linear_test: evaluate(&linear, &test)?,
        neural_train: evaluate(&neural.model, &train)?,
        neural_test: evaluate(&neural.model, &test)?,
    };
    ctx.write_json("metrics.json", &report)?;

    let mut w = csv::Writer::from_writer(ctx.create("loss.csv")?);
    w.write_record(["epoch", "minibatch_loss", "train_mse"])?;
    for (i, (a, b)) in neural.epoch_losses.iter().zip(&neural.epoch_eval_losses).enumerate() {
        w.write_record([(i + 1).to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    if !neural.epoch_losses.is_empty() {
        plot::line_chart(
            &ctx.out_path("loss.png")?,
            &[(&neural.epoch_losses, [200, 120, 40]), (&neural.epoch_eval_losses, [30, 90, 200])],
        )?;
    }

    let mut out = std::io::stdout().lock();
    writeln!(out, "model   split  mse           r2")?;
    for (name, split, m) in [
        ("linear", "train", report.linear_train),
        ("linear", "test", report.linear_test),
        ("neural", "train", report.neural_train),
        ("neural", "test", report.neural_test),
    ] {
        writeln!(out, "{name:<7} {split:<6} {:<13.6} {:.6}", m.mse, m.r_squared)?;
    }
    Ok(())
}
