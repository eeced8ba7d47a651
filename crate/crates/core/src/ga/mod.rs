//! Single-island genetic algorithm for one block equation
//! `min |c - Σ b_j x_j|` over bitstrings `x`.

mod chromosome;
mod fitness;
mod heuristic;
mod operators;
mod params;
mod population;
mod selection;

pub use chromosome::Chromosome;
pub use fitness::{fitness, FitnessContext};
pub use heuristic::improve;
pub use operators::{
    crossover_one_point, crossover_two_point, crossover_uniform, crossover_uniform_masked, mutate, mutate_at,
};
pub use params::{GAParams, HeuristicFraction};
pub use population::{breed, ga_generation, init_population, select_survivors, BreedStats, Population, SelectionKind};
pub use selection::{
    elitist_select, roulette_select, selection_probabilities, selection_probabilities_exact, sus_select, RouletteWheel,
};
