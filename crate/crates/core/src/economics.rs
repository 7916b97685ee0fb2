//! LED panel power draw, time-of-use tariffs and schedule energy cost.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Highest dimming level; level `k` emits `k × 10 %` of the channel maximum.
pub const MAX_LEVEL: u8 = 10;
/// µmol/m²s contributed by one red level.
pub const RED_PPFD_PER_LEVEL: f64 = 20.0;
/// µmol/m²s contributed by one blue level.
pub const BLUE_PPFD_PER_LEVEL: f64 = 10.0;
pub const HOURS_PER_DAY: usize = 24;

/// Cost of the always-on (7, 7) schedule over 15 days under the time-of-use plan,
/// cents. The default [`PowerModel`] is calibrated to reproduce it.
pub const BASELINE_COST_CENTS: f64 = 27.9206;
/// Cents charged per watt drawn around the clock for one day under the default plan:
/// `(7·12 + 3·25 + 7·38 + 6·25 + 1·12) / 1000`.
pub const DAILY_CENTS_PER_WATT: f64 = 0.587;

/// A red/blue dimming level pair for one hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LevelPair {
    pub red: u8,
    pub blue: u8,
}

impl LevelPair {
    pub const fn new(red: u8, blue: u8) -> Self {
        Self { red, blue }
    }

    pub fn validate(self) -> Result<Self> {
        if self.red > MAX_LEVEL || self.blue > MAX_LEVEL {
            return Err(Error::Encoding(format!(
                "light levels must lie in 0..={MAX_LEVEL}, got ({}, {})",
                self.red, self.blue
            )));
        }
        Ok(self)
    }

    /// `(red, blue)` PPFD in µmol/m²s.
    pub fn ppfd<T: Scalar>(self) -> (T, T) {
        (T::lit(self.red as f64 * RED_PPFD_PER_LEVEL), T::lit(self.blue as f64 * BLUE_PPFD_PER_LEVEL))
    }
}

/// Affine panel power: `standby + red·red_watts_per_unit + blue·blue_watts_per_unit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PowerModel<T> {
    pub red_watts_per_unit: T,
    pub blue_watts_per_unit: T,
    pub standby_watts: T,
}

impl<T: Scalar> Default for PowerModel<T> {
    /// Calibrated so the 15-day (7, 7) schedule costs [`BASELINE_COST_CENTS`], with both
    /// channels drawing the same watts per level. A blue level emits half the PPFD of a
    /// red level, so blue costs twice as much energy per µmol/m²s.
    fn default() -> Self {
        let watts_at_7_7 = BASELINE_COST_CENTS / (15.0 * DAILY_CENTS_PER_WATT);
        let per_level = watts_at_7_7 / 14.0;
        Self { red_watts_per_unit: T::lit(per_level), blue_watts_per_unit: T::lit(per_level), standby_watts: T::zero() }
    }
}

impl<T: Scalar> PowerModel<T> {
    pub fn new(red_watts_per_unit: T, blue_watts_per_unit: T, standby_watts: T) -> Result<Self> {
        let pm = Self { red_watts_per_unit, blue_watts_per_unit, standby_watts };
        pm.validate()?;
        Ok(pm)
    }

    pub fn validate(&self) -> Result<()> {
        let coeffs = [self.red_watts_per_unit, self.blue_watts_per_unit, self.standby_watts];
        if coeffs.iter().any(|c| !(*c >= T::zero()) || !c.is_finite()) {
            return Err(Error::Config("power coefficients must be finite and non-negative".into()));
        }
        let red_per_umol = self.red_watts_per_unit / T::lit(RED_PPFD_PER_LEVEL);
        let blue_per_umol = self.blue_watts_per_unit / T::lit(BLUE_PPFD_PER_LEVEL);
        if !(blue_per_umol > red_per_umol) {
            return Err(Error::Config("blue light must cost more energy per µmol/m²s than red light".into()));
        }
        Ok(())
    }

    /// Panel draw in watts. Unchecked; `levels` must already be valid.
    #[inline]
    pub(crate) fn watts(&self, levels: LevelPair) -> T {
        self.standby_watts
            + T::lit(levels.red as f64) * self.red_watts_per_unit
            + T::lit(levels.blue as f64) * self.blue_watts_per_unit
    }

    pub fn power_draw(&self, red_level: u8, blue_level: u8) -> Result<T> {
        let levels = LevelPair::new(red_level, blue_level).validate()?;
        Ok(self.watts(levels))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TariffBand<T> {
    pub start_hour: u8,
    /// Exclusive; 24 closes the day.
    pub end_hour: u8,
    /// cents per kWh
    pub rate: T,
}

/// Piecewise-constant hour-of-day electricity price.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct TariffPlan<T> {
    bands: Vec<TariffBand<T>>,
    #[serde(skip)]
    hourly: [T; HOURS_PER_DAY],
}

impl<'de, T: Scalar> Deserialize<'de> for TariffPlan<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "T: Scalar")]
        struct Raw<T> {
            bands: Vec<TariffBand<T>>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        TariffPlan::new(raw.bands).map_err(serde::de::Error::custom)
    }
}

impl<T: Scalar> TariffPlan<T> {
    /// Validates that `bands` partition `[0, 24)` with positive rates.
    pub fn new(mut bands: Vec<TariffBand<T>>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Tariff("no bands".into()));
        }
        bands.sort_by_key(|b| b.start_hour);
        let mut hourly = [T::zero(); HOURS_PER_DAY];
        let mut next = 0u8;
        for b in &bands {
            if b.start_hour != next {
                return Err(Error::Tariff(if b.start_hour > next {
                    format!("hours {next}..{} are not covered", b.start_hour)
                } else {
                    format!("band starting at {} overlaps the previous band", b.start_hour)
                }));
            }
            if b.end_hour <= b.start_hour || b.end_hour as usize > HOURS_PER_DAY {
                return Err(Error::Tariff(format!("band {}..{} is empty or past 24", b.start_hour, b.end_hour)));
            }
            if !(b.rate > T::zero()) || !b.rate.is_finite() {
                return Err(Error::Tariff(format!("band {}..{} has non-positive rate", b.start_hour, b.end_hour)));
            }
            for h in b.start_hour..b.end_hour {
                hourly[h as usize] = b.rate;
            }
            next = b.end_hour;
        }
        if next as usize != HOURS_PER_DAY {
            return Err(Error::Tariff(format!("hours {next}..24 are not covered")));
        }
        Ok(Self { bands, hourly })
    }

    /// Tokyo Electric Power Company time-of-use plan, cents (yen) per kWh.
    pub fn tepco() -> Self {
        let band = |start_hour, end_hour, rate: f64| TariffBand { start_hour, end_hour, rate: T::lit(rate) };
        Self::new(vec![band(0, 7, 12.0), band(7, 10, 25.0), band(10, 17, 38.0), band(17, 23, 25.0), band(23, 24, 12.0)])
            .expect("built-in plan is a partition")
    }

    pub fn bands(&self) -> &[TariffBand<T>] {
        &self.bands
    }

    pub fn rate(&self, hour_of_day: usize) -> Result<T> {
        self.hourly
            .get(hour_of_day)
            .copied()
            .ok_or_else(|| Error::Validation(format!("hour of day {hour_of_day} outside 0..24")))
    }

    #[inline]
    pub(crate) fn rate_at(&self, hour_index: usize) -> T {
        self.hourly[hour_index % HOURS_PER_DAY]
    }

    /// Cents for drawing one kilowatt around the clock for a day.
    pub fn daily_kw_cost(&self) -> T {
        self.hourly.iter().copied().sum()
    }
}

pub fn tariff_rate<T: Scalar>(plan: &TariffPlan<T>, hour_of_day: usize) -> Result<T> {
    plan.rate(hour_of_day)
}

/// Hourly red/blue levels; index 0 is 00:00 of day one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LightSchedule {
    levels: Vec<LevelPair>,
}

impl LightSchedule {
    pub fn new(levels: Vec<LevelPair>) -> Result<Self> {
        for (i, l) in levels.iter().enumerate() {
            l.validate().map_err(|e| Error::Encoding(format!("hour {i}: {e}")))?;
        }
        Ok(Self { levels })
    }

    pub fn constant(horizon: usize, levels: LevelPair) -> Result<Self> {
        Self::new(vec![levels; horizon])
    }

    pub fn horizon(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[LevelPair] {
        &self.levels
    }

    pub fn concat(&self, other: &LightSchedule) -> LightSchedule {
        let mut levels = self.levels.clone();
        levels.extend_from_slice(&other.levels);
        LightSchedule { levels }
    }

    /// Writes `hour_index,red_level,blue_level` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["hour_index", "red_level", "blue_level"])?;
        for (i, l) in self.levels.iter().enumerate() {
            out.write_record([i.to_string(), l.red.to_string(), l.blue.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            hour_index: usize,
            red_level: u8,
            blue_level: u8,
        }
        let mut rdr = csv::Reader::from_reader(r);
        let mut levels = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::Parse { line, message: e.to_string() })?;
            if row.hour_index != i {
                return Err(Error::Parse {
                    line,
                    message: format!("expected hour_index {i}, found {}", row.hour_index),
                });
            }
            levels.push(LevelPair::new(row.red_level, row.blue_level));
        }
        Self::new(levels)
    }
}

/// Per-hour electricity cost of `schedule` in cents, with hour 0 at `start_hour` of day.
pub fn hourly_costs<T: Scalar>(
    power: &PowerModel<T>,
    tariff: &TariffPlan<T>,
    schedule: &LightSchedule,
    start_hour: usize,
) -> Vec<T> {
    let kilo = T::lit(1000.0);
    schedule.levels().iter().enumerate().map(|(i, &l)| power.watts(l) / kilo * tariff.rate_at(start_hour + i)).collect()
}

/// Total electricity cost in cents, schedule starting at 00:00.
pub fn schedule_cost<T: Scalar>(power: &PowerModel<T>, tariff: &TariffPlan<T>, schedule: &LightSchedule) -> T {
    schedule_cost_from(power, tariff, schedule, 0)
}

pub fn schedule_cost_from<T: Scalar>(
    power: &PowerModel<T>,
    tariff: &TariffPlan<T>,
    schedule: &LightSchedule,
    start_hour: usize,
) -> T {
    hourly_costs(power, tariff, schedule, start_hour).into_iter().sum()
}
