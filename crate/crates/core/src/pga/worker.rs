use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;

use crate::crypto::ratio;
use crate::ga::{breed, select_survivors, BreedStats, Chromosome, FitnessContext, GAParams, Population};
use crate::BitString;

/// Returned by [`phi`] for a chromosome whose subset sum is zero.
pub const PHI_UNDEFINED: f64 = f64::INFINITY;

/// `c / Σ b_j x_j` for the block behind `ctx`. Exact solutions give 1.
pub fn phi(ctx: &FitnessContext, bits: &BitString) -> f64 {
    let sum = ctx.subset_sum(bits);
    if sum.is_zero() {
        return PHI_UNDEFINED;
    }
    ratio(ctx.target(), &sum)
}

#[derive(Debug, Clone)]
pub struct MigrationMessage {
    /// Evaluated under the destination block's context.
    pub chromosome: Chromosome,
    pub source_block: usize,
    pub dest_block: usize,
    pub source_generation: u64,
}

/// A block's population frozen at a migration checkpoint.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub block_index: usize,
    pub generation: u64,
    pub ctx: FitnessContext,
    pub fitness: Vec<BigUint>,
}

impl Snapshot {
    pub fn of(state: &BlockWorkerState) -> Self {
        Snapshot {
            block_index: state.block_index,
            generation: state.generation,
            ctx: state.ctx.clone(),
            fitness: state.population.members().iter().map(|m| m.fitness().clone()).collect(),
        }
    }

    pub fn best_fitness(&self) -> Option<&BigUint> {
        self.fitness.iter().min()
    }
}

#[derive(Debug, Clone)]
pub struct BlockWorkerState {
    pub block_index: usize,
    pub population: Population,
    pub ctx: FitnessContext,
    pub generation: u64,
    /// Best chromosome seen so far, which survives a roulette draw that loses it.
    pub best: Chromosome,
    pub solved: bool,
    pub inbox: VecDeque<MigrationMessage>,
}

impl BlockWorkerState {
    pub fn new(block_index: usize, ctx: FitnessContext, population: Population) -> Self {
        let best = population.best().clone();
        let solved = best.fitness().is_zero();
        BlockWorkerState { block_index, population, ctx, generation: 0, best, solved, inbox: VecDeque::new() }
    }

    /// Folds the current members into `best`.
    pub fn observe(&mut self) {
        let champion = self.population.best();
        if champion.fitness() < self.best.fitness() {
            self.best = champion.clone();
        }
        self.solved = self.best.fitness().is_zero();
    }

    pub fn breed<R: Rng + ?Sized>(&mut self, params: &GAParams, rng: &mut R) -> BreedStats {
        let stats = breed(&mut self.population, &self.ctx, params, rng);
        self.observe();
        stats
    }

    /// Selection back to capacity; closes the generation.
    pub fn select<R: Rng + ?Sized>(&mut self, params: &GAParams, rng: &mut R) {
        let placeholder = Population::from_members(Vec::new(), self.population.capacity());
        let pop = std::mem::replace(&mut self.population, placeholder);
        self.population = select_survivors(pop, params, rng).0;
        assert_eq!(self.population.len(), self.population.capacity(), "population size drifted");
        self.generation += 1;
    }
}

/// Every source member that beats all of a target snapshot under the
/// target's own fitness, once per distinct bitstring and target.
pub fn migration_candidates(source: &BlockWorkerState, targets: &[Arc<Snapshot>]) -> Vec<MigrationMessage> {
    let mut out = Vec::new();
    for target in targets.iter().filter(|t| t.block_index != source.block_index) {
        let Some(bar) = target.best_fitness() else { continue };
        let mut seen = HashSet::new();
        for member in source.population.members() {
            let fit = target.ctx.evaluate(member.bits());
            if fit < *bar && seen.insert(member.bits()) {
                assert!(target.fitness.iter().all(|f| fit < *f), "migrant does not dominate the target snapshot");
                let mut chromosome = Chromosome::new(member.bits().clone());
                chromosome.evaluate(&target.ctx);
                out.push(MigrationMessage {
                    chromosome,
                    source_block: source.block_index,
                    dest_block: target.block_index,
                    source_generation: source.generation,
                });
            }
        }
    }
    out
}

/// Drains the inbox, each migrant replacing the current worst member.
/// Returns the number integrated.
pub fn integrate_migrants(state: &mut BlockWorkerState) -> usize {
    let mut accepted = 0;
    while let Some(msg) = state.inbox.pop_front() {
        debug_assert_eq!(msg.dest_block, state.block_index);
        let mut migrant = msg.chromosome;
        migrant.reevaluate(&state.ctx);
        let worst = state.population.worst_index();
        state.population.members_mut()[worst] = migrant;
        accepted += 1;
    }
    if accepted > 0 {
        state.observe();
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{encrypt_block, keygen, PublicKey};
    use crate::ga::init_population;
    use crate::rng;

    fn key(n: usize, seed: u64) -> Arc<PublicKey> {
        Arc::new(keygen(n, &mut rng::from_seed(seed)).unwrap().1)
    }

    fn state_with(index: usize, ctx: FitnessContext, members: Vec<BitString>) -> BlockWorkerState {
        let cap = members.len();
        let members = members.into_iter().map(Chromosome::new).collect();
        BlockWorkerState::new(index, ctx.clone(), Population::evaluated(members, cap, &ctx))
    }

    fn random_members(n: usize, count: usize, seed: u64) -> Vec<BitString> {
        let mut r = rng::from_seed(seed);
        (0..count).map(|_| BitString::random(n, &mut r)).collect()
    }

    #[test]
    fn phi_at_solution_and_at_zero() {
        let pk = key(16, 1);
        let x: BitString = "1011001110001101".parse().unwrap();
        let ctx = FitnessContext::new(pk.clone(), encrypt_block(&pk, &x).unwrap());
        assert_eq!(phi(&ctx, &x), 1.0);
        assert_eq!(phi(&ctx, &BitString::zeros(16)), PHI_UNDEFINED);
    }

    #[test]
    fn phi_orders_like_fitness_near_the_solution() {
        let pk = key(12, 2);
        let x: BitString = "101100111000".parse().unwrap();
        let c = encrypt_block(&pk, &x).unwrap();
        let ctx = FitnessContext::new(pk.clone(), c.clone());
        let mut neighbours = Vec::new();
        for i in 0..12 {
            for j in i..12 {
                for l in j..12 {
                    let mut m = x.clone();
                    for p in [i, j, l].into_iter().collect::<HashSet<_>>() {
                        m.flip(p);
                    }
                    neighbours.push(m);
                }
            }
        }
        // |c/S - 1| is f/(c+f) above c and f/(c-f) below it, increasing in f
        // on each side.
        for side in [true, false] {
            let mut pts: Vec<(BigUint, f64)> = neighbours
                .iter()
                .filter(|m| (ctx.subset_sum(m) > c) == side)
                .map(|m| (ctx.evaluate(m), (phi(&ctx, m) - 1.0).abs()))
                .collect();
            pts.sort_by(|a, b| a.0.cmp(&b.0));
            assert!(pts.windows(2).all(|w| w[0].1 <= w[1].1));
        }
    }

    #[test]
    fn no_candidates_when_nothing_dominates() {
        let pk = key(16, 3);
        let x = BitString::random(16, &mut rng::from_seed(4));
        let ctx = FitnessContext::new(pk.clone(), encrypt_block(&pk, &x).unwrap());
        let target = state_with(1, ctx.clone(), vec![x.clone(), x.complement()]);
        let source = state_with(0, ctx.retarget(pk.total() * 7u32), random_members(16, 20, 5));
        assert!(migration_candidates(&source, &[Arc::new(Snapshot::of(&target))]).is_empty());
    }

    #[test]
    fn exact_solution_migrates_once() {
        let pk = key(16, 6);
        let (x0, x1) = (BitString::random(16, &mut rng::from_seed(7)), BitString::random(16, &mut rng::from_seed(8)));
        let ctx0 = FitnessContext::new(pk.clone(), encrypt_block(&pk, &x0).unwrap());
        let ctx1 = ctx0.retarget(encrypt_block(&pk, &x1).unwrap());
        let mut target_members = random_members(16, 10, 10);
        target_members.retain(|m| *m != x1);
        let target = state_with(1, ctx1.clone(), target_members);
        let bar = target.population.best().fitness().clone();
        let mut source_members = random_members(16, 30, 9);
        source_members.retain(|m| ctx1.evaluate(m) >= bar);
        source_members.push(x1.clone());
        let source = state_with(0, ctx0, source_members);
        let snaps = [Arc::new(Snapshot::of(&source)), Arc::new(Snapshot::of(&target))];
        let msgs = migration_candidates(&source, &snaps);
        let to_target: Vec<_> = msgs.iter().filter(|m| m.dest_block == 1).collect();
        assert_eq!(to_target.len(), 1, "{msgs:?}");
        assert_eq!(to_target[0].chromosome.bits(), &x1);
        assert!(to_target[0].chromosome.fitness().is_zero());
        assert!(msgs.iter().all(|m| m.dest_block != m.source_block));
    }

    #[test]
    fn integration_replaces_the_worst_and_keeps_size() {
        let pk = key(16, 11);
        let x = BitString::random(16, &mut rng::from_seed(12));
        let ctx = FitnessContext::new(pk.clone(), encrypt_block(&pk, &x).unwrap());
        let mut members = random_members(16, 10, 13);
        members.retain(|m| *m != x);
        let mut state = state_with(0, ctx.clone(), members);
        let before = state.clone();
        assert_eq!(integrate_migrants(&mut state), 0);
        assert_eq!(state.population, before.population);

        let worst = state.population.members()[state.population.worst_index()].clone();
        let mut migrant = Chromosome::new(x.clone());
        // a stale cache from another context must not leak through
        migrant.evaluate(&ctx.retarget(BigUint::from(1u8)));
        state.inbox.push_back(MigrationMessage {
            chromosome: migrant,
            source_block: 1,
            dest_block: 0,
            source_generation: 0,
        });
        assert_eq!(integrate_migrants(&mut state), 1);
        assert_eq!(state.population.len(), before.population.len());
        assert!(!state.population.members().contains(&worst));
        assert_eq!(state.population.best().bits(), &x);
        assert!(state.solved && state.inbox.is_empty());
    }

    #[test]
    fn seeded_solution_is_detected_before_any_generation() {
        let pk = key(24, 14);
        let x = BitString::random(24, &mut rng::from_seed(15));
        let ctx = FitnessContext::new(pk.clone(), encrypt_block(&pk, &x).unwrap());
        let params = GAParams { pop_size: 20, ..GAParams::default() };
        let pop = init_population(&ctx, &params, &mut rng::from_seed(16));
        let mut members = pop.into_members();
        members[5] = Chromosome::new(x);
        let state = BlockWorkerState::new(0, ctx.clone(), Population::evaluated(members, 20, &ctx));
        assert!(state.solved);
        assert_eq!(state.generation, 0);
    }
}
