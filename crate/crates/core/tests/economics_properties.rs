use growlight::economics::{
    hourly_costs, schedule_cost, schedule_cost_from, tariff_rate, LevelPair, LightSchedule, PowerModel, TariffBand,
    TariffPlan, MAX_LEVEL,
};
use proptest::prelude::*;

fn levels() -> impl Strategy<Value = LevelPair> {
    (0..=MAX_LEVEL, 0..=MAX_LEVEL).prop_map(|(r, b)| LevelPair::new(r, b))
}

fn schedule(max_len: usize) -> impl Strategy<Value = LightSchedule> {
    proptest::collection::vec(levels(), 1..max_len).prop_map(|l| LightSchedule::new(l).unwrap())
}

fn power() -> impl Strategy<Value = PowerModel<f64>> {
    (0.01..1.0f64, 1.0..3.0f64, 0.0..2.0f64).prop_map(|(red, factor, standby)| {
        // blue per level must cost more than half a red level to cost more per µmol
        PowerModel::new(red, red * factor, standby).unwrap()
    })
}

/// Random partition of the day: sorted distinct cut hours and a rate per band.
fn plan() -> impl Strategy<Value = TariffPlan<f64>> {
    (proptest::collection::btree_set(1u8..24, 0..8), proptest::collection::vec(1.0..50.0f64, 9)).prop_map(
        |(cuts, rates)| {
            let bounds: Vec<u8> = std::iter::once(0).chain(cuts).chain(std::iter::once(24)).collect();
            let bands = bounds
                .windows(2)
                .zip(rates)
                .map(|(w, rate)| TariffBand { start_hour: w[0], end_hour: w[1], rate })
                .collect();
            TariffPlan::new(bands).unwrap()
        },
    )
}

#[test]
fn phase_shift_scales_by_band_ratio() {
    let power = PowerModel::<f64>::default();
    let tariff = TariffPlan::tepco();
    let one_hour_at = |hour: usize| {
        let mut l = vec![LevelPair::new(0, 0); 24];
        l[hour] = LevelPair::new(10, 10);
        schedule_cost(&power, &tariff, &LightSchedule::new(l).unwrap())
    };
    let (early, noon) = (one_hour_at(5), one_hour_at(12));
    assert!((noon / early - 38.0 / 12.0).abs() < 1e-12);
}

#[test]
fn malformed_plans_are_rejected() {
    let band = |s, e, r| TariffBand { start_hour: s, end_hour: e, rate: r };
    assert!(TariffPlan::new(vec![band(0, 12, 1.0)]).is_err());
    assert!(TariffPlan::new(vec![band(0, 12, 1.0), band(11, 24, 1.0)]).is_err());
    assert!(TariffPlan::new(vec![band(0, 12, 1.0), band(12, 24, 0.0)]).is_err());
    assert!(TariffPlan::new(vec![band(0, 25, 1.0)]).is_err());
    assert!(TariffPlan::<f64>::new(vec![]).is_err());
    let json = r#"{"bands":[{"start_hour":0,"end_hour":10,"rate":5.0}]}"#;
    assert!(serde_json::from_str::<TariffPlan<f64>>(json).is_err());
    assert!(tariff_rate(&TariffPlan::<f64>::tepco(), 24).is_err());
    assert!(PowerModel::new(1.0, 0.4, 0.0).is_err());
    assert!(PowerModel::<f64>::default().power_draw(11, 0).is_err());
}

proptest! {
    #[test]
    fn every_hour_matches_exactly_one_band(plan in plan()) {
        for h in 0..24u8 {
            let matching: Vec<_> = plan.bands().iter().filter(|b| b.start_hour <= h && h < b.end_hour).collect();
            prop_assert_eq!(matching.len(), 1);
            prop_assert_eq!(tariff_rate(&plan, h as usize).unwrap(), matching[0].rate);
        }
        let json = serde_json::to_string(&plan).unwrap();
        prop_assert_eq!(serde_json::from_str::<TariffPlan<f64>>(&json).unwrap(), plan);
    }

    #[test]
    fn cost_is_additive_over_concatenation(a in schedule(60), b in schedule(60), p in power(), t in plan()) {
        let whole = schedule_cost(&p, &t, &a.concat(&b));
        let parts = schedule_cost(&p, &t, &a) + schedule_cost_from(&p, &t, &b, a.horizon());
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1.0));
    }

    #[test]
    fn raising_a_level_never_lowers_cost(s in schedule(50), p in power(), t in plan(), idx in 0usize..100, blue in any::<bool>()) {
        let mut l = s.levels().to_vec();
        let i = idx % l.len();
        let before = schedule_cost(&p, &t, &s);
        let g = &mut l[i];
        let c = if blue { &mut g.blue } else { &mut g.red };
        prop_assume!(*c < MAX_LEVEL);
        *c += 1;
        let after = schedule_cost(&p, &t, &LightSchedule::new(l).unwrap());
        prop_assert!(after >= before);
    }

    #[test]
    fn hourly_cost_is_power_times_rate(s in schedule(48), p in power()) {
        let t = TariffPlan::tepco();
        for (i, (c, l)) in hourly_costs(&p, &t, &s, 0).iter().zip(s.levels()).enumerate() {
            let watts = p.power_draw(l.red, l.blue).unwrap();
            let expected = watts / 1000.0 * tariff_rate(&t, i % 24).unwrap();
            prop_assert!((c - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn schedule_csv_round_trips(s in schedule(100)) {
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        prop_assert_eq!(LightSchedule::read_csv(buf.as_slice()).unwrap(), s);
    }
}
