use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use growlight::growth::sensitivity_grid;

use super::Ctx;
use crate::plot;

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Growth model file, or `synthetic` for the built-in generator.
    #[arg(long, value_name = "FILE|synthetic")]
    pub model: Option<PathBuf>,
    /// Plant age in days.
    #[arg(long, default_value_t = 7.0)]
    pub t_days: f64,
    #[arg(long, default_value_t = 21)]
    pub red_steps: usize,
    #[arg(long, default_value_t = 11)]
    pub blue_steps: usize,
}

pub fn run(ctx: &Ctx, args: SensitivityArgs) -> Result<()> {
    let model = ctx.model(args.model.as_deref())?;
    let c = &ctx.cfg.conditions;
    let grid = sensitivity_grid(&model, args.t_days, c.ec, c.ph, args.red_steps, args.blue_steps)?;

    let mut w = csv::Writer::from_writer(ctx.create("sensitivity.csv")?);
    let header: Vec<String> =
        std::iter::once("red_ppfd".to_string()).chain(grid.blue_ppfd.iter().map(|b| format!("blue_{b}"))).collect();
    w.write_record(&header)?;
    for (i, red) in grid.red_ppfd.iter().enumerate() {
        let row: Vec<String> =
            std::iter::once(red.to_string()).chain(grid.row(i).iter().map(|v| v.to_string())).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    plot::heatmap(&ctx.out_path("heatmap.png")?, &grid.values, args.red_steps, args.blue_steps, grid.argmax)?;
    ctx.write_json("sensitivity.json", &grid)?;

    let (red, blue) = grid.argmax_ppfd();
    println!("argmax red_ppfd={red} blue_ppfd={blue} growth={}", grid.value(grid.argmax.0, grid.argmax.1));
    Ok(())
}
