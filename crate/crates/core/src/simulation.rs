//! Hour-by-hour leaf-area rollouts of lighting schedules and baseline comparisons.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::economics::{hourly_costs, LevelPair, LightSchedule, PowerModel, TariffPlan, HOURS_PER_DAY};
use crate::error::{Error, Result};
use crate::growth::{GrowthFeatures, GrowthRate};
use crate::scalar::Scalar;

/// Default 15-day horizon in hours.
pub const DEFAULT_HORIZON: usize = 360;
pub const BASELINE_LEVELS: LevelPair = LevelPair::new(7, 7);

/// Constant nutrient state and starting size for a rollout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct GrowthConditions<T> {
    /// cm²
    pub initial_leaf_area: T,
    /// µS/cm
    pub ec: T,
    pub ph: T,
}

impl<T: Scalar> Default for GrowthConditions<T> {
    fn default() -> Self {
        Self { initial_leaf_area: T::lit(5.0), ec: T::lit(1800.0), ph: T::lit(6.5) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SimulationResult<T> {
    /// `L_0 … L_H`, cm²
    pub trajectory: Vec<T>,
    pub final_leaf_area: T,
    /// cents
    pub electricity_cost: T,
    /// cents
    pub revenue: T,
    /// cents
    pub profit: T,
    /// Some hour fed the model a feature outside its normalization range.
    pub extrapolated: bool,
}

impl<T: Scalar> SimulationResult<T> {
    /// Fills cost, revenue `price · L_H · plants` and profit.
    pub fn with_economics(
        mut self,
        power: &PowerModel<T>,
        tariff: &TariffPlan<T>,
        schedule: &LightSchedule,
        price_per_area: T,
        plants: usize,
    ) -> Self {
        self.electricity_cost = hourly_costs(power, tariff, schedule, 0).into_iter().sum();
        self.revenue = price_per_area * self.final_leaf_area * T::from_usize_lossy(plants);
        self.profit = self.revenue - self.electricity_cost;
        self
    }
}

#[inline]
pub(crate) fn hour_features<T: Scalar>(levels: LevelPair, hour_index: usize, ec: T, ph: T) -> GrowthFeatures<T> {
    let (red, blue) = levels.ppfd::<T>();
    let t_days = T::from_usize_lossy(hour_index) / T::from_usize_lossy(HOURS_PER_DAY);
    GrowthFeatures::new(red, blue, ec, ph, t_days)
}

/// Rolls `schedule` through `model`: `L_{δ+1} = L_δ + exp(f · 1 h)`. Cost fields are
/// left at zero; see [`SimulationResult::with_economics`].
pub fn simulate_growth<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    schedule: &LightSchedule,
    conditions: &GrowthConditions<T>,
) -> Result<SimulationResult<T>> {
    simulate_growth_from(model, schedule, conditions, 0)
}

/// Like [`simulate_growth`] with the schedule's first hour at absolute hour `start_hour`
/// since transplant.
pub fn simulate_growth_from<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    schedule: &LightSchedule,
    conditions: &GrowthConditions<T>,
    start_hour: usize,
) -> Result<SimulationResult<T>> {
    if !(conditions.initial_leaf_area > T::zero()) {
        return Err(Error::Validation(format!(
            "initial leaf area must be positive, got {}",
            conditions.initial_leaf_area
        )));
    }
    let ranges = model.ranges();
    let mut trajectory = Vec::with_capacity(schedule.horizon() + 1);
    let mut area = conditions.initial_leaf_area;
    let mut extrapolated = false;
    trajectory.push(area);
    for (i, &levels) in schedule.levels().iter().enumerate() {
        let f = hour_features(levels, start_hour + i, conditions.ec, conditions.ph);
        extrapolated |= !ranges.out_of_range(&f).is_empty();
        area += model.growth_exponent(&f).exp();
        if !area.is_finite() {
            return Err(Error::Simulation { step: start_hour + i });
        }
        trajectory.push(area);
    }
    Ok(SimulationResult {
        final_leaf_area: area,
        trajectory,
        electricity_cost: T::zero(),
        revenue: T::zero(),
        profit: T::zero(),
        extrapolated,
    })
}

/// Final leaf area only, without building the trajectory.
pub(crate) fn final_leaf_area<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    levels: &[LevelPair],
    conditions: &GrowthConditions<T>,
) -> Result<T> {
    let mut area = conditions.initial_leaf_area;
    for (i, &l) in levels.iter().enumerate() {
        area += model.growth_exponent(&hour_features(l, i, conditions.ec, conditions.ph)).exp();
        if !area.is_finite() {
            return Err(Error::Simulation { step: i });
        }
    }
    Ok(area)
}

/// Always-on (7, 7) schedule over the default 15-day horizon.
pub fn run_baseline() -> LightSchedule {
    baseline_schedule(DEFAULT_HORIZON)
}

pub fn baseline_schedule(horizon: usize) -> LightSchedule {
    LightSchedule::constant(horizon, BASELINE_LEVELS).expect("baseline levels are valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComparisonReport<T> {
    pub baseline: SimulationResult<T>,
    pub proposed: SimulationResult<T>,
    pub pct_improvement_leaf_area: T,
    /// Positive means the proposal is cheaper.
    pub pct_improvement_cost: T,
    pub pct_improvement_profit: T,
}

/// `(new − old) / |old| · 100`.
pub fn pct_change<T: Scalar>(new: T, old: T, what: &str) -> Result<T> {
    if old == T::zero() {
        return Err(Error::Comparison(format!("baseline {what} is zero")));
    }
    Ok((new - old) / old.abs() * T::lit(100.0))
}

pub fn compare<T: Scalar>(
    proposed: &SimulationResult<T>,
    baseline: &SimulationResult<T>,
) -> Result<ComparisonReport<T>> {
    Ok(ComparisonReport {
        pct_improvement_leaf_area: pct_change(proposed.final_leaf_area, baseline.final_leaf_area, "leaf area")?,
        pct_improvement_cost: -pct_change(proposed.electricity_cost, baseline.electricity_cost, "electricity cost")?,
        pct_improvement_profit: pct_change(proposed.profit, baseline.profit, "profit")?,
        baseline: baseline.clone(),
        proposed: proposed.clone(),
    })
}

/// Writes `hour_index,red_ppfd,blue_ppfd,leaf_area,hourly_cost_cents`, where
/// `leaf_area` is the area at the end of that hour.
pub fn write_trajectory_csv<T: Scalar, W: Write>(
    w: W,
    result: &SimulationResult<T>,
    schedule: &LightSchedule,
    power: &PowerModel<T>,
    tariff: &TariffPlan<T>,
) -> Result<()> {
    let costs = hourly_costs(power, tariff, schedule, 0);
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["hour_index", "red_ppfd", "blue_ppfd", "leaf_area", "hourly_cost_cents"])?;
    for (i, (&levels, cost)) in schedule.levels().iter().zip(costs).enumerate() {
        let (red, blue) = levels.ppfd::<T>();
        out.write_record([
            i.to_string(),
            red.to_string(),
            blue.to_string(),
            result.trajectory[i + 1].to_string(),
            cost.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Summary document for a rollout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SimulationSummary<T> {
    pub horizon_hours: usize,
    pub initial_leaf_area: T,
    pub final_leaf_area: T,
    pub electricity_cost: T,
    pub revenue: T,
    pub profit: T,
    pub extrapolated: bool,
}

impl<T: Scalar> SimulationSummary<T> {
    pub fn new(result: &SimulationResult<T>) -> Self {
        Self {
            horizon_hours: result.trajectory.len() - 1,
            initial_leaf_area: result.trajectory[0],
            final_leaf_area: result.final_leaf_area,
            electricity_cost: result.electricity_cost,
            revenue: result.revenue,
            profit: result.profit,
            extrapolated: result.extrapolated,
        }
    }
}
