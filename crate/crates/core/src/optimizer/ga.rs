use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chromosome::Chromosome;
use super::fitness::{fitness, FitnessContext};
use super::operators::{crossover, mutate};
use crate::error::{Error, Result};
use crate::growth::GrowthRate;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population_size: usize,
    pub parent_count: usize,
    pub crossover_points: usize,
    pub mutations_per_child: usize,
    pub generations: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 100,
            parent_count: 50,
            crossover_points: 6,
            mutations_per_child: 20,
            generations: 300,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population must hold at least two chromosomes".into()));
        }
        if self.parent_count == 0 || self.parent_count > self.population_size {
            return Err(Error::Config(format!(
                "parent count must lie in 1..={}, got {}",
                self.population_size, self.parent_count
            )));
        }
        if self.generations == 0 {
            return Err(Error::Config("at least one generation is required".into()));
        }
        Ok(())
    }

    /// Cut count actually used for a chromosome of `len` loci.
    pub fn effective_crossover_points(&self, len: usize) -> usize {
        self.crossover_points.min(len.saturating_sub(1))
    }

    /// Mutations actually applied per child of `len` loci; at least one inherited
    /// component always survives.
    pub fn effective_mutations(&self, len: usize) -> usize {
        self.mutations_per_child.min((2 * len).saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GenerationStats<T> {
    pub generation: usize,
    pub best_fitness: T,
    pub mean_fitness: T,
    pub best: Chromosome,
}

/// Per-generation statistics; entry 0 is the initial population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaTrace<T> {
    pub generations: Vec<GenerationStats<T>>,
}

impl<T: Scalar> GaTrace<T> {
    pub fn best_fitness(&self) -> Vec<T> {
        self.generations.iter().map(|g| g.best_fitness).collect()
    }

    /// Writes `generation,best_fitness,mean_fitness`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["generation", "best_fitness", "mean_fitness"])?;
        for g in &self.generations {
            out.write_record([g.generation.to_string(), g.best_fitness.to_string(), g.mean_fitness.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome<T> {
    pub best: Chromosome,
    pub best_fitness: T,
    pub trace: GaTrace<T>,
}

/// Runs the GA from a uniformly random initial population.
pub fn evolve<T: Scalar, M: GrowthRate<T> + ?Sized>(
    ctx: &FitnessContext<'_, T, M>,
    params: &GaParams,
) -> Result<GaOutcome<T>> {
    ctx.validate()?;
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let initial = (0..params.population_size).map(|_| Chromosome::random(ctx.horizon, &mut rng)).collect();
    run(ctx, params, initial, rng)
}

/// Runs the GA from a caller-supplied initial population.
pub fn evolve_from<T: Scalar, M: GrowthRate<T> + ?Sized>(
    ctx: &FitnessContext<'_, T, M>,
    params: &GaParams,
    initial: Vec<Chromosome>,
) -> Result<GaOutcome<T>> {
    ctx.validate()?;
    params.validate()?;
    if initial.len() != params.population_size {
        return Err(Error::Config(format!(
            "initial population has {} chromosomes, expected {}",
            initial.len(),
            params.population_size
        )));
    }
    if let Some(c) = initial.iter().find(|c| c.len() != ctx.horizon) {
        return Err(Error::Config(format!("initial chromosome covers {} hours, horizon is {}", c.len(), ctx.horizon)));
    }
    run(ctx, params, initial, ChaCha8Rng::seed_from_u64(params.seed))
}

fn score<T: Scalar, M: GrowthRate<T> + ?Sized>(ctx: &FitnessContext<'_, T, M>, population: &[Chromosome]) -> Vec<T> {
    population
        .par_iter()
        .map(|c| match fitness(c, ctx) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("fitness evaluation failed, scoring -inf: {e}");
                T::neg_infinity()
            }
        })
        .collect()
}

/// Truncation selection: the `parent_count` fittest survive unchanged (so the best
/// individual is never lost) and the rest of the population is refilled with mutated
/// k-point crossovers of distinct random parents. All randomness is drawn serially
/// here; fitness evaluation may run in parallel without affecting the result.
fn run<T: Scalar, M: GrowthRate<T> + ?Sized>(
    ctx: &FitnessContext<'_, T, M>,
    params: &GaParams,
    mut population: Vec<Chromosome>,
    mut rng: ChaCha8Rng,
) -> Result<GaOutcome<T>> {
    let points = params.effective_crossover_points(ctx.horizon);
    let mutations = params.effective_mutations(ctx.horizon);
    if points != params.crossover_points || mutations != params.mutations_per_child {
        log::debug!("horizon {} caps crossover points at {points} and mutations per child at {mutations}", ctx.horizon);
    }
    let n_children = params.population_size - params.parent_count;
    let mut scores = score(ctx, &population);
    let mut trace = GaTrace { generations: Vec::with_capacity(params.generations + 1) };

    for generation in 0..=params.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_order(&scores[a]));
        population = order.iter().map(|&i| population[i].clone()).collect();
        scores = order.iter().map(|&i| scores[i]).collect();

        let mean = scores.iter().copied().sum::<T>() / T::from_usize_lossy(scores.len());
        trace.generations.push(GenerationStats {
            generation,
            best_fitness: scores[0],
            mean_fitness: mean,
            best: population[0].clone(),
        });
        if generation == params.generations {
            break;
        }

        population.truncate(params.parent_count);
        scores.truncate(params.parent_count);
        let mut children = Vec::with_capacity(n_children);
        for _ in 0..n_children {
            let (i, j) = pick_pair(params.parent_count, &mut rng);
            let child = crossover(&population[i], &population[j], points, &mut rng)?;
            children.push(mutate(&child, mutations, &mut rng)?);
        }
        scores.extend(score(ctx, &children));
        population.extend(children);
    }

    Ok(GaOutcome { best: population[0].clone(), best_fitness: scores[0], trace })
}

fn pick_pair<R: Rng>(parents: usize, rng: &mut R) -> (usize, usize) {
    if parents == 1 {
        return (0, 0);
    }
    let i = rng.gen_range(0..parents);
    let mut j = rng.gen_range(0..parents - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics::{LevelPair, PowerModel, TariffPlan};
    use crate::growth::SyntheticGrowth;
    use crate::optimizer::ProfitSettings;
    use crate::simulation::GrowthConditions;

    fn context<'a>(
        model: &'a SyntheticGrowth,
        power: &'a PowerModel<f64>,
        tariff: &'a TariffPlan<f64>,
        horizon: usize,
    ) -> FitnessContext<'a, f64, SyntheticGrowth> {
        FitnessContext {
            model,
            power,
            tariff,
            profit: ProfitSettings {
                price_per_area: 0.01,
                min_final_area: 5.0 + horizon as f64,
                ..ProfitSettings::default()
            },
            conditions: GrowthConditions::default(),
            horizon,
        }
    }

    #[test]
    fn pairs_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let (i, j) = pick_pair(5, &mut rng);
            assert!(i != j && i < 5 && j < 5);
        }
        assert_eq!(pick_pair(1, &mut rng), (0, 0));
    }

    #[test]
    fn closed_population_without_mutation_stays_put() {
        let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
        let ctx = context(&m, &p, &t, 24);
        let c = Chromosome::new(vec![LevelPair::new(6, 2); 24]).unwrap();
        let params = GaParams { mutations_per_child: 0, generations: 300, seed: 3, ..GaParams::default() };
        let out = evolve_from(&ctx, &params, vec![c.clone(); 100]).unwrap();
        assert_eq!(out.best, c);
        assert!(out.trace.generations.iter().all(|g| g.best == c));
    }

    #[test]
    fn seeded_runs_are_identical_and_monotone() {
        let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
        let ctx = context(&m, &p, &t, 48);
        let params = GaParams { generations: 40, seed: 17, ..GaParams::default() };
        let a = evolve(&ctx, &params).unwrap();
        let b = evolve(&ctx, &params).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.trace.generations.len(), 41);
        let best = a.trace.best_fitness();
        assert!(best.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(a.best_fitness, *best.last().unwrap());
    }

    #[test]
    fn parameter_validation() {
        assert!(GaParams { parent_count: 0, ..GaParams::default() }.validate().is_err());
        assert!(GaParams { parent_count: 101, ..GaParams::default() }.validate().is_err());
        assert!(GaParams { generations: 0, ..GaParams::default() }.validate().is_err());
        let p = GaParams::default();
        assert_eq!(p.effective_crossover_points(2), 1);
        assert_eq!(p.effective_crossover_points(360), 6);
        assert_eq!(p.effective_mutations(2), 3);
        assert_eq!(p.effective_mutations(360), 20);
    }

    #[test]
    fn trace_csv() {
        let (m, p, t) = (SyntheticGrowth::default(), PowerModel::default(), TariffPlan::tepco());
        let ctx = context(&m, &p, &t, 4);
        let out = evolve(&ctx, &GaParams { generations: 2, ..GaParams::default() }).unwrap();
        let mut buf = Vec::new();
        out.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("generation,best_fitness,mean_fitness\n0,"));
    }
}
