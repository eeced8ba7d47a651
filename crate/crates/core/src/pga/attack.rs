use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bus::MigrationBus;
use super::config::{secs, AttackConfig};
use super::worker::{integrate_migrants, migration_candidates, BlockWorkerState, Snapshot};
use crate::crypto::files::decimal;
use crate::crypto::{encrypt_block, Ciphertext, PublicKey};
use crate::ga::{init_population, FitnessContext};
use crate::{rng, BitString, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockResult {
    pub block_index: usize,
    pub solved: bool,
    /// The recovered block, or the best candidate when unsolved.
    pub candidate: BitString,
    #[serde(with = "decimal")]
    pub best_fitness: BigUint,
    pub generations: u64,
    #[serde(with = "secs")]
    pub elapsed: Duration,
    pub migrants_accepted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub n: usize,
    pub k: usize,
    pub master_seed: u64,
    pub config: AttackConfig,
    pub per_block: Vec<BlockResult>,
    /// Concatenated candidates cut to the ciphertext's bit length.
    pub plaintext: BitString,
    /// Bitwise agreement with the true plaintext, when it was supplied.
    pub resemblance: Option<f64>,
    #[serde(with = "secs")]
    pub total_elapsed: Duration,
    pub migrations_sent: u64,
    pub migrations_accepted: u64,
    pub migrations_dropped: u64,
}

impl AttackReport {
    /// Every block recovered. An empty ciphertext is not a success.
    pub fn success(&self) -> bool {
        !self.per_block.is_empty() && self.per_block.iter().all(|b| b.solved)
    }

    pub fn generations(&self) -> u64 {
        self.per_block.iter().map(|b| b.generations).max().unwrap_or(0)
    }

    /// Fills in `resemblance` against the true message bits.
    pub fn score(&mut self, truth: &BitString) -> Result<f64> {
        let r = resemblance_ratio(&self.plaintext, truth)?;
        self.resemblance = Some(r);
        Ok(r)
    }
}

/// Fraction of positions where the two bitstrings agree.
pub fn resemblance_ratio(found: &BitString, truth: &BitString) -> Result<f64> {
    if found.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), actual: found.len() });
    }
    if truth.is_empty() {
        return Err(Error::ZeroLength);
    }
    Ok((truth.len() - found.hamming(truth)) as f64 / truth.len() as f64)
}

struct Limits {
    max_generations: u64,
    deadline: Instant,
}

impl Limits {
    fn exhausted(&self, state: &BlockWorkerState) -> bool {
        state.generation >= self.max_generations || Instant::now() >= self.deadline
    }
}

fn is_checkpoint(cfg: &AttackConfig, state: &BlockWorkerState) -> bool {
    cfg.migration_enabled && (state.generation + 1) % cfg.migration_period == 0
}

fn finish(state: &BlockWorkerState, started: Instant, accepted: u64) -> BlockResult {
    BlockResult {
        block_index: state.block_index,
        solved: state.solved,
        candidate: state.best.bits().clone(),
        best_fitness: state.best.fitness().clone(),
        generations: state.generation,
        elapsed: started.elapsed(),
        migrants_accepted: accepted,
    }
}

fn new_worker<R: Rng + ?Sized>(index: usize, ctx: FitnessContext, cfg: &AttackConfig, rng: &mut R) -> BlockWorkerState {
    let population = init_population(&ctx, &cfg.ga, rng);
    BlockWorkerState::new(index, ctx, population)
}

/// One block's island loop: breed, exchange migrants at checkpoints, select.
/// Returns when the block is solved, a budget runs out or `stop` is raised.
pub fn run_block_worker<R: Rng + ?Sized>(
    mut state: BlockWorkerState,
    cfg: &AttackConfig,
    bus: &MigrationBus,
    stop: &AtomicBool,
    deadline: Instant,
    rng: &mut R,
) -> BlockResult {
    let started = Instant::now();
    let limits = Limits { max_generations: cfg.max_generations(), deadline };
    let mut accepted = 0;
    while !state.solved && !stop.load(Ordering::Relaxed) {
        if limits.exhausted(&state) {
            if Instant::now() >= deadline {
                stop.store(true, Ordering::Relaxed);
            }
            break;
        }
        state.breed(&cfg.ga, rng);
        if is_checkpoint(cfg, &state) {
            bus.publish(Snapshot::of(&state));
            for msg in migration_candidates(&state, &bus.snapshots_except(state.block_index)) {
                bus.send(msg);
            }
        }
        state.inbox.extend(bus.drain(state.block_index));
        accepted += integrate_migrants(&mut state) as u64;
        state.select(&cfg.ga, rng);
    }
    finish(&state, started, accepted)
}

/// All blocks on the calling thread, one generation each per round.
fn run_lockstep(contexts: Vec<FitnessContext>, cfg: &AttackConfig, seed: u64, bus: &MigrationBus) -> Vec<BlockResult> {
    let started = Instant::now();
    let limits = Limits { max_generations: cfg.max_generations(), deadline: started + cfg.wall_clock_budget };
    let mut rngs: Vec<_> = (0..contexts.len()).map(|i| rng::split(seed, i as u64)).collect();
    let mut states: Vec<BlockWorkerState> =
        contexts.into_iter().enumerate().map(|(i, ctx)| new_worker(i, ctx, cfg, &mut rngs[i])).collect();
    let mut accepted = vec![0u64; states.len()];
    let mut finished: Vec<Option<Duration>> = vec![None; states.len()];

    loop {
        for (i, state) in states.iter().enumerate() {
            if finished[i].is_none() && (state.solved || limits.exhausted(state)) {
                finished[i] = Some(started.elapsed());
            }
        }
        let live: Vec<usize> = (0..states.len()).filter(|&i| finished[i].is_none()).collect();
        if live.is_empty() {
            break;
        }
        for &i in &live {
            states[i].breed(&cfg.ga, &mut rngs[i]);
        }
        let checkpoint: Vec<usize> = live.iter().copied().filter(|&i| is_checkpoint(cfg, &states[i])).collect();
        for &i in &checkpoint {
            bus.publish(Snapshot::of(&states[i]));
        }
        for &i in &checkpoint {
            for msg in migration_candidates(&states[i], &bus.snapshots_except(i)) {
                bus.send(msg);
            }
        }
        for &i in &live {
            let state = &mut states[i];
            state.inbox.extend(bus.drain(i));
            accepted[i] += integrate_migrants(state) as u64;
            state.select(&cfg.ga, &mut rngs[i]);
        }
    }

    states
        .iter()
        .zip(finished)
        .zip(accepted)
        .map(|((state, at), acc)| BlockResult { elapsed: at.unwrap_or_default(), ..finish(state, started, acc) })
        .collect()
}

fn run_threaded(contexts: Vec<FitnessContext>, cfg: &AttackConfig, seed: u64, bus: &MigrationBus) -> Vec<BlockResult> {
    let deadline = Instant::now() + cfg.wall_clock_budget;
    let stop = AtomicBool::new(false);
    std::thread::scope(|scope| {
        let handles: Vec<_> = contexts
            .into_iter()
            .enumerate()
            .map(|(i, ctx)| {
                let (stop, bus) = (&stop, bus);
                scope.spawn(move || {
                    let mut rng = rng::split(seed, i as u64);
                    let state = new_worker(i, ctx, cfg, &mut rng);
                    run_block_worker(state, cfg, bus, stop, deadline, &mut rng)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("block worker panicked")).collect()
    })
}

/// Attacks every block of `ct` with one island per block. Block `i` draws
/// from stream `i` of `seed`, so adding blocks does not perturb earlier ones.
pub fn run_attack(ct: &Ciphertext, pk: &PublicKey, cfg: &AttackConfig, seed: u64) -> Result<AttackReport> {
    cfg.validate()?;
    if ct.n != pk.n() {
        return Err(Error::LengthMismatch { expected: pk.n(), actual: ct.n });
    }
    let started = Instant::now();
    let contexts = FitnessContext::for_targets(Arc::new(pk.clone()), &ct.blocks);
    let bus = MigrationBus::new(ct.k(), cfg.inbox_capacity);
    let mut per_block = if cfg.sequential || ct.k() <= 1 {
        run_lockstep(contexts, cfg, seed, &bus)
    } else {
        run_threaded(contexts, cfg, seed, &bus)
    };

    for (result, c) in per_block.iter_mut().zip(&ct.blocks) {
        // the flag is re-derived from the ciphertext, not trusted
        let verified = encrypt_block(pk, &result.candidate)? == *c;
        assert_eq!(verified, result.solved, "solved flag disagrees with re-encryption");
        result.solved = verified;
    }
    let mut plaintext = BitString::concat(per_block.iter().map(|b| &b.candidate));
    plaintext.truncate(ct.bit_length);
    let migrations_accepted = per_block.iter().map(|b| b.migrants_accepted).sum();
    Ok(AttackReport {
        n: ct.n,
        k: ct.k(),
        master_seed: seed,
        config: cfg.clone(),
        per_block,
        plaintext,
        resemblance: None,
        total_elapsed: started.elapsed(),
        migrations_sent: bus.sent(),
        migrations_accepted,
        migrations_dropped: bus.dropped(),
    })
}
