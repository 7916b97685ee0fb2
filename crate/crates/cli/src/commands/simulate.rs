use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use growlight::economics::LightSchedule;
use growlight::simulation::{
    baseline_schedule, compare as compare_results, simulate_growth, write_trajectory_csv, ComparisonReport,
    SimulationResult, SimulationSummary,
};
use serde::Serialize;

use super::{read_json, Ctx, EconomicsArgs};
use crate::input_error;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub econ: EconomicsArgs,
    /// Schedule CSV (`hour_index,red_level,blue_level`); defaults to the (7, 7) baseline.
    #[arg(long, value_name = "FILE")]
    pub schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// `simulation.json` of the proposed schedule.
    #[arg(long, value_name = "FILE")]
    pub proposed: PathBuf,
    /// `simulation.json` of the reference schedule.
    #[arg(long, value_name = "FILE")]
    pub baseline: PathBuf,
}

/// Percent improvement of a proposal over a reference; positive is better.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Percentages {
    pub leaf_area: f64,
    pub cost: f64,
    pub profit: f64,
}

impl From<&ComparisonReport<f64>> for Percentages {
    fn from(r: &ComparisonReport<f64>) -> Self {
        // adding zero folds -0 into 0 so identical schedules print cleanly
        Self {
            leaf_area: r.pct_improvement_leaf_area + 0.0,
            cost: r.pct_improvement_cost + 0.0,
            profit: r.pct_improvement_profit + 0.0,
        }
    }
}

pub fn print_table(rows: &[(&str, &SimulationResult<f64>)], pct: &Percentages) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:<10} {:>14} {:>12} {:>12}", "schedule", "leaf_area_cm2", "cost_cents", "profit_cents")?;
    for (name, r) in rows {
        writeln!(out, "{name:<10} {:>14.4} {:>12.4} {:>12.4}", r.final_leaf_area, r.electricity_cost, r.profit)?;
    }
    writeln!(out, "{:<10} {:>14.4} {:>12.4} {:>12.4}", "change_pct", pct.leaf_area, pct.cost, pct.profit)?;
    Ok(())
}

pub fn run(ctx: &Ctx, args: SimulateArgs) -> Result<()> {
    let cfg = args.econ.apply(&ctx.cfg);
    let schedule = match &args.schedule {
        Some(p) => {
            let f = File::open(p).with_context(|| input_error(format!("cannot read schedule {}", p.display())))?;
            LightSchedule::read_csv(f).with_context(|| p.display().to_string())?
        }
        None => baseline_schedule(cfg.horizon),
    };
    let model = ctx.model(args.econ.model.as_deref())?;
    let tariff = ctx.tariff(args.econ.tariff.as_deref())?;
    let power = ctx.power(args.econ.power.as_deref())?;
    let (price, n) = (cfg.profit.price_per_area, cfg.profit.plants_per_panel);
    let sim = simulate_growth(&model, &schedule, &cfg.conditions)?.with_economics(&power, &tariff, &schedule, price, n);
    let base = baseline_schedule(schedule.horizon());
    let bl = simulate_growth(&model, &base, &cfg.conditions)?.with_economics(&power, &tariff, &base, price, n);
    let pct = Percentages::from(&compare_results(&sim, &bl)?);
    if sim.extrapolated {
        log::warn!("the schedule drives the model outside its normalization range");
    }

    write_trajectory_csv(ctx.create("trajectory.csv")?, &sim, &schedule, &power, &tariff)?;
    ctx.write_json("simulation.json", &SimulationSummary::new(&sim))?;
    ctx.write_json("baseline.json", &SimulationSummary::new(&bl))?;
    print_table(&[("baseline", &bl), ("simulated", &sim)], &pct)?;
    Ok(())
}

fn as_result(s: &SimulationSummary<f64>) -> SimulationResult<f64> {
    SimulationResult {
        trajectory: vec![s.initial_leaf_area, s.final_leaf_area],
        final_leaf_area: s.final_leaf_area,
        electricity_cost: s.electricity_cost,
        revenue: s.revenue,
        profit: s.profit,
        extrapolated: s.extrapolated,
    }
}

pub fn compare(ctx: &Ctx, args: CompareArgs) -> Result<()> {
    let proposed: SimulationSummary<f64> = read_json(&args.proposed)?;
    let baseline: SimulationSummary<f64> = read_json(&args.baseline)?;
    let (p, b) = (as_result(&proposed), as_result(&baseline));
    let pct = Percentages::from(&compare_results(&p, &b)?);
    ctx.write_json("comparison.json", &pct)?;
    print_table(&[("baseline", &b), ("proposed", &p)], &pct)?;
    Ok(())
}
