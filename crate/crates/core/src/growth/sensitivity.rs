use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::features::{GrowthFeatures, MAX_BLUE_PPFD, MAX_RED_PPFD};
use super::model::GrowthRate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hourly leaf-area increase `exp(f · 1 h)` over a red × blue PPFD grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SensitivityGrid<T> {
    pub t_days: T,
    pub ec: T,
    pub ph: T,
    pub red_ppfd: Vec<T>,
    pub blue_ppfd: Vec<T>,
    /// Row-major, one row per red value.
    pub values: Vec<T>,
    /// `(red index, blue index)` of the largest cell, first occurrence in row-major order.
    pub argmax: (usize, usize),
}

impl<T: Scalar> SensitivityGrid<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.red_ppfd.len(), self.blue_ppfd.len())
    }

    pub fn value(&self, red_idx: usize, blue_idx: usize) -> T {
        self.values[red_idx * self.blue_ppfd.len() + blue_idx]
    }

    pub fn row(&self, red_idx: usize) -> &[T] {
        let w = self.blue_ppfd.len();
        &self.values[red_idx * w..(red_idx + 1) * w]
    }

    /// PPFD pair `(red, blue)` of the argmax cell.
    pub fn argmax_ppfd(&self) -> (T, T) {
        (self.red_ppfd[self.argmax.0], self.blue_ppfd[self.argmax.1])
    }
}

fn axis<T: Scalar>(max: f64, steps: usize) -> Vec<T> {
    (0..steps).map(|i| T::lit(max * i as f64 / (steps - 1) as f64)).collect()
}

/// Evaluates growth over `[0, 200] × [0, 100]` µmol/m²s at fixed age, EC and pH.
pub fn sensitivity_grid<T: Scalar, M: GrowthRate<T> + ?Sized>(
    model: &M,
    t_days: T,
    ec: T,
    ph: T,
    red_steps: usize,
    blue_steps: usize,
) -> Result<SensitivityGrid<T>> {
    if red_steps < 2 || blue_steps < 2 {
        return Err(Error::Config(format!(
            "sensitivity grid needs at least 2 steps per axis, got {red_steps}x{blue_steps}"
        )));
    }
    let red_ppfd = axis::<T>(MAX_RED_PPFD, red_steps);
    let blue_ppfd = axis::<T>(MAX_BLUE_PPFD, blue_steps);
    let values: Vec<T> = red_ppfd
        .par_iter()
        .flat_map_iter(|&red| {
            blue_ppfd.iter().map(move |&blue| {
                let f = GrowthFeatures::new(red, blue, ec, ph, t_days);
                model.growth_exponent(&f).exp()
            })
        })
        .collect();

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(SensitivityGrid { t_days, ec, ph, red_ppfd, blue_ppfd, values, argmax: (best / blue_steps, best % blue_steps) })
}
