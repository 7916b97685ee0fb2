use anyhow::Result;
use clap::Args;
use growlight::optimizer::{evolve, fitness_breakdown, FitnessBreakdown, FitnessContext};
use growlight::simulation::{baseline_schedule, compare, simulate_growth, SimulationSummary};
use serde::Serialize;

use super::simulate::{print_table, Percentages};
use super::{Ctx, EconomicsArgs};
use crate::plot;

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub econ: EconomicsArgs,
    /// Leaf area the final plant must exceed, cm².
    #[arg(long)]
    pub min_area: Option<f64>,
    /// Cents per cm² of shortfall below --min-area.
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub parents: Option<usize>,
    #[arg(long)]
    pub crossover_points: Option<usize>,
    #[arg(long)]
    pub mutations: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Summary {
    horizon_hours: usize,
    best: FitnessBreakdown<f64>,
    optimized: SimulationSummary<f64>,
    baseline: SimulationSummary<f64>,
    vs_baseline_pct: Percentages,
}

pub fn run(ctx: &Ctx, args: OptimizeArgs) -> Result<()> {
    let mut cfg = args.econ.apply(&ctx.cfg);
    let p = &mut cfg.profit;
    if let Some(v) = args.min_area {
        p.min_final_area = v;
    }
    if let Some(v) = args.penalty {
        p.penalty_per_area = v;
    }
    let ga = &mut cfg.ga;
    for (slot, flag) in [
        (&mut ga.population_size, args.population),
        (&mut ga.parent_count, args.parents),
        (&mut ga.crossover_points, args.crossover_points),
        (&mut ga.mutations_per_child, args.mutations),
        (&mut ga.generations, args.generations),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }

    let model = ctx.model(args.econ.model.as_deref())?;
    let tariff = ctx.tariff(args.econ.tariff.as_deref())?;
    let power = ctx.power(args.econ.power.as_deref())?;
    let fctx = FitnessContext {
        model: &model,
        power: &power,
        tariff: &tariff,
        profit: cfg.profit,
        conditions: cfg.conditions,
        horizon: cfg.horizon,
    };
    let outcome = evolve(&fctx, &cfg.ga)?;
    let best = fitness_breakdown(&outcome.best, &fctx)?;

    let schedule = outcome.best.to_schedule();
    let base = baseline_schedule(cfg.horizon);
    let (price, n) = (cfg.profit.price_per_area, cfg.profit.plants_per_panel);
    let opt = simulate_growth(&model, &schedule, &cfg.conditions)?.with_economics(&power, &tariff, &schedule, price, n);
    let bl = simulate_growth(&model, &base, &cfg.conditions)?.with_economics(&power, &tariff, &base, price, n);
    let pct = Percentages::from(&compare(&opt, &bl)?);

    schedule.write_csv(ctx.create("schedule.csv")?)?;
    outcome.trace.write_csv(ctx.create("trace.csv")?)?;
    let mean: Vec<f64> = outcome.trace.generations.iter().map(|g| g.mean_fitness).collect();
    plot::line_chart(
        &ctx.out_path("convergence.png")?,
        &[(&outcome.trace.best_fitness(), [30, 90, 200]), (&mean, [200, 120, 40])],
    )?;
    let summary = Summary {
        horizon_hours: cfg.horizon,
        best,
        optimized: SimulationSummary::new(&opt),
        baseline: SimulationSummary::new(&bl),
        vs_baseline_pct: pct,
    };
    ctx.write_json("optimize_summary.json", &summary)?;

    print_table(&[("baseline", &bl), ("optimized", &opt)], &pct)?;
    println!("fitness {:.4}", best.fitness);
    Ok(())
}
