//! Genetic-algorithm search for profit-maximizing lighting schedules.

mod chromosome;
mod fitness;
mod ga;
mod operators;

pub use chromosome::{decode_chromosome, Chromosome, MIN_GENE};
pub use fitness::{fitness, fitness_breakdown, profit_objective, FitnessBreakdown, FitnessContext, ProfitSettings};
pub use ga::{evolve, evolve_from, GaOutcome, GaParams, GaTrace, GenerationStats};
pub use operators::{crossover, crossover_at, mutate};
