use num_bigint::BigUint;

use super::FitnessContext;
use crate::BitString;

/// Candidate plaintext block with its fitness cached under one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chromosome {
    bits: BitString,
    fitness: Option<BigUint>,
}

impl Chromosome {
    pub fn new(bits: BitString) -> Self {
        Chromosome { bits, fitness: None }
    }

    pub(crate) fn with_fitness(bits: BitString, fitness: BigUint) -> Self {
        Chromosome { bits, fitness: Some(fitness) }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn cached_fitness(&self) -> Option<&BigUint> {
        self.fitness.as_ref()
    }

    /// Cached fitness; panics if the chromosome was never evaluated.
    pub fn fitness(&self) -> &BigUint {
        self.fitness.as_ref().expect("chromosome has not been evaluated")
    }

    pub fn evaluate(&mut self, ctx: &FitnessContext) -> &BigUint {
        if self.fitness.is_none() {
            self.fitness = Some(ctx.evaluate(&self.bits));
        }
        self.fitness.as_ref().unwrap()
    }

    /// Drops the cache and re-scores under a (possibly different) context.
    pub fn reevaluate(&mut self, ctx: &FitnessContext) -> &BigUint {
        self.fitness = None;
        self.evaluate(ctx)
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.bits.flip(i);
        self.fitness = None;
    }
}
