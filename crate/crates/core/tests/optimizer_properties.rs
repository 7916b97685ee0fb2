use growlight::economics::{schedule_cost, LevelPair, PowerModel, TariffPlan, MAX_LEVEL};
use growlight::growth::SyntheticGrowth;
use growlight::optimizer::{
    crossover, decode_chromosome, evolve, evolve_from, fitness, fitness_breakdown, mutate, Chromosome, FitnessContext,
    GaParams, ProfitSettings, MIN_GENE,
};
use growlight::simulation::{simulate_growth, GrowthConditions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn valid(c: &Chromosome) -> bool {
    c.genes().iter().all(|g| (MIN_GENE..=MAX_LEVEL).contains(&g.red) && (MIN_GENE..=MAX_LEVEL).contains(&g.blue))
}

fn ctx<'a>(
    model: &'a SyntheticGrowth,
    power: &'a PowerModel<f64>,
    tariff: &'a TariffPlan<f64>,
    price: f64,
    horizon: usize,
) -> FitnessContext<'a, f64, SyntheticGrowth> {
    FitnessContext {
        model,
        power,
        tariff,
        profit: ProfitSettings { price_per_area: price, ..ProfitSettings::default() },
        conditions: GrowthConditions::default(),
        horizon,
    }
}

#[test]
fn mutation_hits_components_uniformly() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let parent = Chromosome::new(vec![LevelPair::new(5, 5); 10]).unwrap();
    let trials = 20_000;
    let mut changed = vec![0usize; 20];
    let mut values = [0usize; 11];
    for _ in 0..trials {
        let child = mutate(&parent, 4, &mut rng).unwrap();
        let diffs = (0..20).filter(|&k| child.component(k) != parent.component(k)).count();
        assert!(diffs <= 4);
        for k in 0..20 {
            if child.component(k) != parent.component(k) {
                changed[k] += 1;
                values[child.component(k) as usize] += 1;
            }
        }
    }
    // each component is picked with probability 4/20 and then differs with probability 9/10
    let expected = trials as f64 * 0.2 * 0.9;
    let sd = (trials as f64 * 0.18 * 0.82).sqrt();
    for c in changed {
        assert!((c as f64 - expected).abs() < 5.0 * sd, "{c} vs {expected}");
    }
    assert_eq!(values[0], 0);
    assert_eq!(values[5], 0);
    let per_value = values.iter().sum::<usize>() as f64 / 9.0;
    for v in [1, 2, 3, 4, 6, 7, 8, 9, 10] {
        assert!((values[v] as f64 - per_value).abs() < 0.05 * per_value);
    }
}

#[test]
fn zero_price_fitness_is_minus_cost() {
    let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
    let c = ctx(&m, &p, &t, 0.0, 360);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let ch = Chromosome::random(360, &mut rng);
        let b = fitness_breakdown(&ch, &c).unwrap();
        let cost = schedule_cost(&p, &t, &ch.to_schedule());
        let area = simulate_growth(&m, &ch.to_schedule(), &c.conditions).unwrap().final_leaf_area;
        let penalty = if area <= 400.0 { 10.0 * (400.0 - area) } else { 0.0 };
        assert!((b.fitness - (-cost - penalty)).abs() < 1e-9);
        if area > 400.0 {
            assert_eq!(b.fitness, -b.electricity_cost);
        }
    }
}

#[test]
fn penalty_drives_feasibility_at_zero_price() {
    let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
    let c = ctx(&m, &p, &t, 0.0, 360);
    let out = evolve(&c, &GaParams::default()).unwrap();
    let area = simulate_growth(&m, &out.best.to_schedule(), &c.conditions).unwrap().final_leaf_area;
    assert!(area > 400.0, "final area {area}");
}

#[test]
fn seeded_runs_repeat_and_trace_is_elitist() {
    let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
    let c = ctx(&m, &p, &t, 0.01, 48);
    let params = GaParams { generations: 40, seed: 3, ..GaParams::default() };
    let a = evolve(&c, &params).unwrap();
    let b = evolve(&c, &params).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.trace.generations.len(), 41);
    assert!(a.trace.best_fitness().windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(a.best_fitness, fitness(&a.best, &c).unwrap());
}

#[test]
fn seeding_the_population_keeps_the_seed_if_it_is_best() {
    let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
    let c = ctx(&m, &p, &t, 0.01, 24);
    let params = GaParams { generations: 5, population_size: 10, parent_count: 5, ..GaParams::default() };
    let good = evolve(&c, &GaParams { generations: 100, ..params.clone() }).unwrap().best;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut pop: Vec<Chromosome> = (0..9).map(|_| Chromosome::random(24, &mut rng)).collect();
    pop.push(good.clone());
    let out = evolve_from(&c, &params, pop).unwrap();
    assert!(out.best_fitness >= fitness(&good, &c).unwrap());
    assert!(evolve_from(&c, &params, vec![good]).is_err());
}

#[test]
fn invalid_parameters_are_rejected() {
    let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
    let c = ctx(&m, &p, &t, 0.01, 4);
    for bad in [
        GaParams { population_size: 1, ..GaParams::default() },
        GaParams { parent_count: 0, ..GaParams::default() },
        GaParams { parent_count: 101, ..GaParams::default() },
        GaParams { generations: 0, ..GaParams::default() },
    ] {
        assert!(evolve(&c, &bad).is_err());
    }
    assert!(evolve(&FitnessContext { horizon: 0, ..c }, &GaParams::default()).is_err());
    let neg = FitnessContext { profit: ProfitSettings { price_per_area: -1.0, ..c.profit }, ..c };
    assert!(evolve(&neg, &GaParams::default()).is_err());
}

fn chromosome(max_len: usize) -> impl Strategy<Value = Chromosome> {
    proptest::collection::vec((MIN_GENE..=MAX_LEVEL, MIN_GENE..=MAX_LEVEL), 2..max_len)
        .prop_map(|g| Chromosome::new(g.into_iter().map(|(r, b)| LevelPair::new(r, b)).collect()).unwrap())
}

proptest! {
    #[test]
    fn operators_stay_inside_the_encoding(a in chromosome(40), seed in any::<u64>(), points in 0usize..8, count in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Chromosome::random(a.len(), &mut rng);
        let points = points.min(a.len() - 1);
        let child = crossover(&a, &b, points, &mut rng).unwrap();
        prop_assert!(valid(&child));
        for (i, g) in child.genes().iter().enumerate() {
            prop_assert!(*g == a.genes()[i] || *g == b.genes()[i]);
        }
        let m = mutate(&child, count.min(2 * a.len()), &mut rng).unwrap();
        prop_assert!(valid(&m));
        let decoded = decode_chromosome::<f64>(&m).unwrap();
        for ((r, b), g) in decoded.iter().zip(m.genes()) {
            prop_assert_eq!((*r, *b), (20.0 * g.red as f64, 10.0 * g.blue as f64));
        }
        prop_assert_eq!(Chromosome::from_schedule(&m.to_schedule()).unwrap(), m);
    }
}
