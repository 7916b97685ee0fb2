use growlight::economics::{schedule_cost, LevelPair, LightSchedule, PowerModel, TariffPlan, MAX_LEVEL};
use growlight::growth::{GrowthFeatures, GrowthModel, GrowthRate, NormalizationRanges, SyntheticGrowth};
use growlight::simulation::{
    baseline_schedule, compare, pct_change, run_baseline, simulate_growth, simulate_growth_from, write_trajectory_csv,
    GrowthConditions, SimulationResult,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn day_long_rollout_matches_naive_loop() {
    let g = SyntheticGrowth::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let levels: Vec<LevelPair> =
        (0..24).map(|_| LevelPair::new(rng.gen_range(0..=10), rng.gen_range(0..=10))).collect();
    let schedule = LightSchedule::new(levels.clone()).unwrap();
    let cond = GrowthConditions { initial_leaf_area: 7.5, ec: 1750.0, ph: 6.6 };
    let sim = simulate_growth(&g, &schedule, &cond).unwrap();

    let mut area = 7.5;
    let mut expected = vec![area];
    for (hour, l) in levels.iter().enumerate() {
        let (red, blue) = (20.0 * l.red as f64, 10.0 * l.blue as f64);
        let t = hour as f64 / 24.0;
        let exponent = -4.9 + (1.0 + red).ln() + 0.2 * (1.0 + blue).ln()
            - 3.0 * blue / (red + 1.0) * t / 15.0
            - 0.1 * ((1750.0 - 1800.0) / 200.0f64).powi(2)
            - 0.1 * ((6.6 - 6.5) / 0.15f64).powi(2);
        area += exponent.exp();
        expected.push(area);
    }
    for (a, b) in sim.trajectory.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12 * b);
    }
    assert!(sim.trajectory.windows(2).all(|w| w[1] > w[0]));
    assert!(!sim.extrapolated);
}

#[test]
fn baseline_economics() {
    let (p, t) = (PowerModel::<f64>::default(), TariffPlan::tepco());
    let base = run_baseline();
    assert_eq!(base, baseline_schedule(360));
    let sim = simulate_growth(&SyntheticGrowth::default(), &base, &GrowthConditions::default())
        .unwrap()
        .with_economics(&p, &t, &base, 0.01, 20);
    assert!((sim.electricity_cost - 27.9206).abs() < 1e-3);
    assert_eq!(sim.revenue, 0.01 * sim.final_leaf_area * 20.0);
    assert_eq!(sim.profit, sim.revenue - sim.electricity_cost);
    assert_eq!(sim.electricity_cost, schedule_cost(&p, &t, &base));
}

#[test]
fn out_of_range_features_are_flagged() {
    let narrow =
        NormalizationRanges::new([(0.0, 100.0), (0.0, 100.0), (1600.0, 2000.0), (6.4, 6.7), (0.0, 15.0)]).unwrap();
    let m = GrowthModel::linear(vec![0.0; 6], narrow).unwrap();
    let hot = LightSchedule::constant(3, LevelPair::new(10, 1)).unwrap();
    assert!(simulate_growth(&m, &hot, &GrowthConditions::default()).unwrap().extrapolated);
    assert!(simulate_growth(&m, &hot, &GrowthConditions { initial_leaf_area: 0.0, ..Default::default() }).is_err());
}

struct Exploding;

impl GrowthRate<f64> for Exploding {
    fn growth_exponent(&self, f: &GrowthFeatures<f64>) -> f64 {
        if f.t_days > 0.1 {
            f64::NAN
        } else {
            0.0
        }
    }

    fn ranges(&self) -> NormalizationRanges<f64> {
        NormalizationRanges::default()
    }
}

#[test]
fn non_finite_exponent_reports_the_step() {
    let s = LightSchedule::constant(10, LevelPair::new(1, 1)).unwrap();
    let err = simulate_growth(&Exploding, &s, &GrowthConditions::default()).unwrap_err();
    assert!(matches!(err, growlight::Error::Simulation { step: 3 }), "{err}");
}

fn result(area: f64, cost: f64, profit: f64) -> SimulationResult<f64> {
    SimulationResult {
        trajectory: vec![5.0, area],
        final_leaf_area: area,
        electricity_cost: cost,
        revenue: profit + cost,
        profit,
        extrapolated: false,
    }
}

#[test]
fn comparison_formulas() {
    let r = compare(&result(486.6086, 16.5461, 100.2399), &result(458.0541, 27.9206, 82.0128)).unwrap();
    assert!((r.pct_improvement_leaf_area - 6.2338).abs() < 1e-4);
    assert!((r.pct_improvement_cost - 40.7387).abs() < 1e-4);
    assert!((r.pct_improvement_profit - 22.2247).abs() < 1e-4);
    // negative baseline profit: relative to its magnitude
    let neg = compare(&result(452.5732, 13.5576, -2.6958), &result(458.0541, 27.9206, -16.9273)).unwrap();
    assert!(neg.pct_improvement_profit > 0.0);
    assert!(compare(&result(1.0, 1.0, 1.0), &result(1.0, 0.0, 1.0)).is_err());
    assert!(pct_change(1.0, 0.0, "x").is_err());
}

#[test]
fn trajectory_csv_has_one_row_per_hour() {
    let (p, t) = (PowerModel::<f64>::default(), TariffPlan::tepco());
    let s = baseline_schedule(30);
    let sim = simulate_growth(&SyntheticGrowth::default(), &s, &GrowthConditions::default()).unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &sim, &s, &p, &t).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "hour_index,red_ppfd,blue_ppfd,leaf_area,hourly_cost_cents");
    assert_eq!(lines.len(), 31);
    assert!(lines[1].starts_with("0,140,70,"));
}

fn schedule(max_len: usize) -> impl Strategy<Value = Vec<LevelPair>> {
    proptest::collection::vec((0..=MAX_LEVEL, 0..=MAX_LEVEL).prop_map(|(r, b)| LevelPair::new(r, b)), 2..max_len)
}

proptest! {
    #[test]
    fn rollout_splits_additively(levels in schedule(120), cut in 1usize..119) {
        let cut = cut.min(levels.len() - 1);
        let g = SyntheticGrowth::default();
        let cond = GrowthConditions::default();
        let whole: SimulationResult<f64> = simulate_growth(&g, &LightSchedule::new(levels.clone()).unwrap(), &cond).unwrap();
        let first = simulate_growth(&g, &LightSchedule::new(levels[..cut].to_vec()).unwrap(), &cond).unwrap();
        let mid = GrowthConditions { initial_leaf_area: first.final_leaf_area, ..cond };
        let second = simulate_growth_from(&g, &LightSchedule::new(levels[cut..].to_vec()).unwrap(), &mid, cut).unwrap();
        prop_assert!((whole.final_leaf_area - second.final_leaf_area).abs() < 1e-9);
    }

    #[test]
    fn swapping_sides_follows_the_formula(a_cost in 1.0..100.0f64, b_cost in 1.0..100.0f64) {
        let a = result(10.0, a_cost, 1.0);
        let b = result(10.0, b_cost, 1.0);
        let ab = compare(&a, &b).unwrap().pct_improvement_cost;
        let ba = compare(&b, &a).unwrap().pct_improvement_cost;
        prop_assert!((ab - (b_cost - a_cost) / b_cost * 100.0).abs() < 1e-9);
        prop_assert!((ba - (a_cost - b_cost) / a_cost * 100.0).abs() < 1e-9);
        prop_assert!((ab * b_cost + ba * a_cost).abs() < 1e-7);
    }
}
