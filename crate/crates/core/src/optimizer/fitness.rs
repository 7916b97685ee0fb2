use serde::{Deserialize, Serialize};

use super::chromosome::Chromosome;
use crate::economics::{PowerModel, TariffPlan};
use crate::error::{Error, Result};
use crate::growth::GrowthRate;
use crate::scalar::Scalar;
use crate::simulation::{final_leaf_area, GrowthConditions};

/// Scalars of the profit objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct ProfitSettings<T> {
    /// Sale price, cents per cm² of leaf per plant.
    pub price_per_area: T,
    pub plants_per_panel: usize,
    /// Final leaf area the schedule has to exceed, cm².
    pub min_final_area: T,
    /// Cents subtracted per cm² of shortfall below `min_final_area`.
    pub penalty_per_area: T,
}

impl<T: Scalar> Default for ProfitSettings<T> {
    fn default() -> Self {
        Self {
            price_per_area: T::lit(0.01),
            plants_per_panel: 20,
            min_final_area: T::lit(400.0),
            penalty_per_area: T::lit(10.0),
        }
    }
}

impl<T: Scalar> ProfitSettings<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.price_per_area >= T::zero()) {
            return Err(Error::Config("price per area must be non-negative".into()));
        }
        if self.plants_per_panel == 0 {
            return Err(Error::Config("at least one plant per panel is required".into()));
        }
        if !(self.min_final_area > T::zero()) {
            return Err(Error::Config("minimum final leaf area must be positive".into()));
        }
        if !(self.penalty_per_area >= T::zero()) {
            return Err(Error::Config("shortfall penalty must be non-negative".into()));
        }
        Ok(())
    }
}

/// Everything a fitness evaluation reads. Borrowed, so one context serves a whole run.
#[derive(Debug, Clone, Copy)]
pub struct FitnessContext<'a, T: Scalar, M: GrowthRate<T> + ?Sized> {
    pub model: &'a M,
    pub power: &'a PowerModel<T>,
    pub tariff: &'a TariffPlan<T>,
    pub profit: ProfitSettings<T>,
    pub conditions: GrowthConditions<T>,
    pub horizon: usize,
}

impl<'a, T: Scalar, M: GrowthRate<T> + ?Sized> FitnessContext<'a, T, M> {
    pub fn validate(&self) -> Result<()> {
        self.profit.validate()?;
        self.power.validate()?;
        if !(self.conditions.initial_leaf_area > T::zero()) {
            return Err(Error::Config("initial leaf area must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least one hour".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FitnessBreakdown<T> {
    pub final_leaf_area: T,
    pub electricity_cost: T,
    pub revenue: T,
    pub penalty: T,
    pub fitness: T,
}

/// `P · L_H · n − cost`, minus `λ · (min_area − L_H)` when `L_H ≤ min_area`.
pub fn profit_objective<T: Scalar>(settings: &ProfitSettings<T>, final_leaf_area: T, cost: T) -> FitnessBreakdown<T> {
    let revenue = settings.price_per_area * final_leaf_area * T::from_usize_lossy(settings.plants_per_panel);
    let penalty = if final_leaf_area <= settings.min_final_area {
        settings.penalty_per_area * (settings.min_final_area - final_leaf_area)
    } else {
        T::zero()
    };
    FitnessBreakdown { final_leaf_area, electricity_cost: cost, revenue, penalty, fitness: revenue - cost - penalty }
}

pub fn fitness_breakdown<T: Scalar, M: GrowthRate<T> + ?Sized>(
    c: &Chromosome,
    ctx: &FitnessContext<'_, T, M>,
) -> Result<FitnessBreakdown<T>> {
    if c.len() != ctx.horizon {
        return Err(Error::Fitness(format!("chromosome covers {} hours, horizon is {}", c.len(), ctx.horizon)));
    }
    let area = final_leaf_area(ctx.model, c.genes(), &ctx.conditions)?;
    let kilo = T::lit(1000.0);
    let cost: T = c.genes().iter().enumerate().map(|(i, &g)| ctx.power.watts(g) / kilo * ctx.tariff.rate_at(i)).sum();
    let b = profit_objective(&ctx.profit, area, cost);
    if !b.fitness.is_finite() {
        return Err(Error::Fitness(format!("objective is not finite ({})", b.fitness)));
    }
    Ok(b)
}

/// Profit of the schedule encoded by `c`, in cents.
pub fn fitness<T: Scalar, M: GrowthRate<T> + ?Sized>(c: &Chromosome, ctx: &FitnessContext<'_, T, M>) -> Result<T> {
    fitness_breakdown(c, ctx).map(|b| b.fitness)
}
