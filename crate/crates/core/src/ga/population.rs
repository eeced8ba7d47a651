use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operators::mutate_in_place;
use super::selection::lowest_indices;
use super::{
    crossover_one_point, crossover_two_point, crossover_uniform, elitist_select, improve, roulette_select,
    selection_probabilities, Chromosome, FitnessContext, GAParams,
};
use crate::BitString;

/// Evaluated chromosomes of one island. Between generations the member count
/// equals `capacity`; during breeding it grows.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    members: Vec<Chromosome>,
    capacity: usize,
}

impl Population {
    pub fn from_members(members: Vec<Chromosome>, capacity: usize) -> Self {
        Population { members, capacity }
    }

    /// Evaluates every member under `ctx`.
    pub fn evaluated(mut members: Vec<Chromosome>, capacity: usize, ctx: &FitnessContext) -> Self {
        for m in &mut members {
            m.evaluate(ctx);
        }
        Population { members, capacity }
    }

    pub fn members(&self) -> &[Chromosome] {
        &self.members
    }

    pub(crate) fn members_mut(&mut self) -> &mut Vec<Chromosome> {
        &mut self.members
    }

    pub fn into_members(self) -> Vec<Chromosome> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// First member with the lowest fitness.
    pub fn best(&self) -> &Chromosome {
        let i = lowest_indices(&self.members, 1)[0];
        &self.members[i]
    }

    /// Last member with the highest fitness.
    pub fn worst_index(&self) -> usize {
        let mut worst = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.fitness() >= self.members[worst].fitness() {
                worst = i;
            }
        }
        worst
    }

    pub fn contains_bits(&self, bits: &BitString) -> bool {
        self.members.iter().any(|m| m.bits() == bits)
    }
}

/// Draws `init_oversample × pop_size` random bitstrings and keeps the
/// `pop_size` fittest.
pub fn init_population<R: Rng + ?Sized>(ctx: &FitnessContext, params: &GAParams, rng: &mut R) -> Population {
    let sample = params.pop_size * params.init_oversample;
    let members = (0..sample).map(|_| Chromosome::new(BitString::random(ctx.n(), rng))).collect();
    let pool = Population::evaluated(members, sample, ctx);
    elitist_select(pool, params.pop_size)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreedStats {
    pub pairs: usize,
    pub offspring: usize,
    pub mutations: usize,
    pub improved: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionKind {
    Roulette,
    Elitist,
}

/// Everything in a generation up to (not including) selection: mating,
/// the three crossovers per pair, mutation over the enlarged population and
/// the improving heuristic on a random share of it.
pub fn breed<R: Rng + ?Sized>(
    pop: &mut Population,
    ctx: &FitnessContext,
    params: &GAParams,
    rng: &mut R,
) -> BreedStats {
    let n = ctx.n();
    let mut stats = BreedStats::default();

    let mut pool: Vec<usize> = (0..pop.len()).filter(|_| rng.gen_bool(params.p_c)).collect();
    pool.shuffle(rng);
    let mut offspring = Vec::new();
    for pair in pool.chunks_exact(2) {
        let (p1, p2) = (&pop.members[pair[0]], &pop.members[pair[1]]);
        stats.pairs += 1;
        if n >= 3 {
            let cut = rng.gen_range(2..n);
            let (a, b) = crossover_one_point(p1, p2, cut).expect("cut drawn in range");
            offspring.extend([a, b]);
        }
        if n >= 2 {
            let cuts = index::sample(rng, n, 2);
            let (lo, hi) = (cuts.index(0).min(cuts.index(1)) + 1, cuts.index(0).max(cuts.index(1)) + 1);
            let (a, b) = crossover_two_point(p1, p2, lo, hi).expect("cuts drawn in range");
            offspring.extend([a, b]);
        }
        offspring.push(crossover_uniform(p1, p2, rng).expect("parents share a length"));
    }
    let mut seen: HashSet<BitString> = HashSet::new();
    if params.distinct_offspring {
        seen.extend(pop.members.iter().map(|m| m.bits().clone()));
        offspring.retain(|c| seen.insert(c.bits().clone()));
    }
    stats.offspring = offspring.len();
    pop.members.extend(offspring);

    for m in &mut pop.members {
        if mutate_in_place(m, params.p_m, rng) {
            stats.mutations += 1;
        }
        m.evaluate(ctx);
    }

    let chosen = params.heuristic_fraction.of(pop.len());
    for i in index::sample(rng, pop.len(), chosen) {
        let better = improve(ctx, &pop.members[i], params.heuristic_iters, rng);
        if better.fitness() < pop.members[i].fitness()
            && (!params.distinct_offspring || seen.insert(better.bits().clone()))
        {
            pop.members[i] = better;
            stats.improved += 1;
        }
    }
    stats
}

/// Restores capacity: roulette wheel with probability `p_s`, elitist otherwise.
pub fn select_survivors<R: Rng + ?Sized>(
    pop: Population,
    params: &GAParams,
    rng: &mut R,
) -> (Population, SelectionKind) {
    let capacity = pop.capacity;
    if rng.gen::<f64>() < params.p_s {
        let fitness: Vec<_> = pop.members.iter().map(|m| m.fitness().clone()).collect();
        let probs = selection_probabilities(&fitness);
        let members = roulette_select(&pop.members, &probs, capacity, rng);
        (Population::from_members(members, capacity), SelectionKind::Roulette)
    } else {
        (elitist_select(pop, capacity), SelectionKind::Elitist)
    }
}

pub fn ga_generation<R: Rng + ?Sized>(
    mut pop: Population,
    ctx: &FitnessContext,
    params: &GAParams,
    rng: &mut R,
) -> Population {
    breed(&mut pop, ctx, params, rng);
    select_survivors(pop, params, rng).0
}
