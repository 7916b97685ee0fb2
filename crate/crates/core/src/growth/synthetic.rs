//! Analytic stand-in for measured lettuce growth, used for testing and demos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{GrowthFeatures, GrowthSample, NormalizationRanges};
use super::model::GrowthRate;
use crate::scalar::Scalar;

/// Closed-form growth exponent
///
/// ```text
/// g = offset + red_gain·ln(1+red) + blue_gain·ln(1+blue)
///     − blue_excess·blue/(red+1)·t/horizon_days
///     − ec_penalty·((ec−ec_center)/ec_scale)² − ph_penalty·((ph−ph_center)/ph_scale)²
/// ```
///
/// Blue light helps young plants and becomes a drag relative to red as they age, so
/// the best red:blue mix drifts toward red over the growing period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticGrowth {
    pub offset: f64,
    pub red_gain: f64,
    pub blue_gain: f64,
    pub blue_excess: f64,
    pub horizon_days: f64,
    pub ec_penalty: f64,
    pub ec_center: f64,
    pub ec_scale: f64,
    pub ph_penalty: f64,
    pub ph_center: f64,
    pub ph_scale: f64,
}

impl Default for SyntheticGrowth {
    fn default() -> Self {
        Self {
            offset: -4.9,
            red_gain: 1.0,
            blue_gain: 0.2,
            blue_excess: 3.0,
            horizon_days: 15.0,
            ec_penalty: 0.1,
            ec_center: 1800.0,
            ec_scale: 200.0,
            ph_penalty: 0.1,
            ph_center: 6.5,
            ph_scale: 0.15,
        }
    }
}

impl<T: Scalar> GrowthRate<T> for SyntheticGrowth {
    fn growth_exponent(&self, f: &GrowthFeatures<T>) -> T {
        let l = T::lit;
        let one = T::one();
        let ec_dev = (f.ec - l(self.ec_center)) / l(self.ec_scale);
        let ph_dev = (f.ph - l(self.ph_center)) / l(self.ph_scale);
        l(self.offset) + l(self.red_gain) * (one + f.red_ppfd).ln() + l(self.blue_gain) * (one + f.blue_ppfd).ln()
            - l(self.blue_excess) * f.blue_ppfd / (f.red_ppfd + one) * f.t_days / l(self.horizon_days)
            - l(self.ec_penalty) * ec_dev * ec_dev
            - l(self.ph_penalty) * ph_dev * ph_dev
    }

    fn ranges(&self) -> NormalizationRanges<T> {
        NormalizationRanges::default()
    }
}

/// Sampling box for [`synthetic_samples`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleBox {
    pub red: (f64, f64),
    pub blue: (f64, f64),
    pub ec: (f64, f64),
    pub ph: (f64, f64),
    pub t_days: (f64, f64),
    pub leaf_area_start: (f64, f64),
    /// Half-width of uniform noise added to the growth exponent.
    pub noise: f64,
}

impl Default for SampleBox {
    /// Light spans the lowest to highest non-off panel level.
    fn default() -> Self {
        Self {
            red: (20.0, 200.0),
            blue: (10.0, 100.0),
            ec: (1600.0, 2000.0),
            ph: (6.4, 6.7),
            t_days: (0.0, 15.0),
            leaf_area_start: (5.0, 50.0),
            noise: 0.0,
        }
    }
}

/// One-hour growth observations drawn uniformly from `bounds`, labelled by `generator`.
pub fn synthetic_samples<T: Scalar>(
    generator: &SyntheticGrowth,
    bounds: &SampleBox,
    count: usize,
    seed: u64,
) -> Vec<GrowthSample<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.gen::<f64>();
    (0..count)
        .map(|_| {
            let f = GrowthFeatures::new(
                T::lit(draw(bounds.red)),
                T::lit(draw(bounds.blue)),
                T::lit(draw(bounds.ec)),
                T::lit(draw(bounds.ph)),
                T::lit(draw(bounds.t_days)),
            );
            let l1 = T::lit(draw(bounds.leaf_area_start));
            let noise = T::lit(bounds.noise * (2.0 * draw((0.0, 1.0)) - 1.0));
            let exponent = generator.growth_exponent(&f) + noise;
            GrowthSample {
                features: f,
                delta_t_hours: T::one(),
                leaf_area_start: l1,
                leaf_area_end: l1 + exponent.exp(),
            }
        })
        .collect()
}
