use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::Chromosome;
use crate::crypto::{abs_diff, check_len, PublicKey};
use crate::{BitString, Result};

/// The objective for one block: public weights plus the block ciphertext.
///
/// When every subset sum and the target fit in a `u128` the context keeps a
/// narrow copy of the weights; all arithmetic stays exact either way.
#[derive(Debug, Clone)]
pub struct FitnessContext {
    key: Arc<PublicKey>,
    target: BigUint,
    narrow: Option<Narrow>,
}

#[derive(Debug, Clone)]
pub(crate) struct Narrow {
    pub weights: Arc<[u128]>,
    pub target: u128,
}

impl FitnessContext {
    pub fn new(key: Arc<PublicKey>, target: BigUint) -> Self {
        let weights = (key.total().bits() < 128)
            .then(|| key.weights().iter().map(|b| b.to_u128().expect("total fits")).collect::<Arc<[u128]>>());
        Self::with_weights(key, target, weights)
    }

    /// Contexts for several targets under one key, sharing the weight tables.
    pub fn for_targets(key: Arc<PublicKey>, targets: &[BigUint]) -> Vec<Self> {
        let Some(first) = targets.first() else { return Vec::new() };
        let base = Self::new(key, first.clone());
        targets.iter().map(|t| base.retarget(t.clone())).collect()
    }

    pub fn retarget(&self, target: BigUint) -> Self {
        Self::with_weights(self.key.clone(), target, self.narrow.as_ref().map(|n| n.weights.clone()))
    }

    fn with_weights(key: Arc<PublicKey>, target: BigUint, weights: Option<Arc<[u128]>>) -> Self {
        let narrow = weights.zip(target.to_u128()).map(|(weights, target)| Narrow { weights, target });
        FitnessContext { key, target, narrow }
    }

    pub fn n(&self) -> usize {
        self.key.n()
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    pub fn public_key(&self) -> &Arc<PublicKey> {
        &self.key
    }

    pub(crate) fn narrow(&self) -> Option<&Narrow> {
        self.narrow.as_ref()
    }

    pub fn subset_sum(&self, bits: &BitString) -> BigUint {
        match &self.narrow {
            Some(nw) => BigUint::from(narrow_sum(&nw.weights, bits)),
            None => self.key.subset_sum(bits),
        }
    }

    /// `|target - sum|` for a subset sum computed elsewhere.
    pub fn fitness_of_sum(&self, sum: &BigUint) -> BigUint {
        abs_diff(&self.target, sum)
    }

    /// Uncached fitness of a raw bitstring. Lengths must already agree.
    pub fn evaluate(&self, bits: &BitString) -> BigUint {
        debug_assert_eq!(bits.len(), self.n());
        match &self.narrow {
            Some(nw) => BigUint::from(nw.target.abs_diff(narrow_sum(&nw.weights, bits))),
            None => abs_diff(&self.target, &self.key.subset_sum(bits)),
        }
    }

    pub fn is_solution(&self, bits: &BitString) -> bool {
        self.evaluate(bits).is_zero()
    }
}

pub(crate) fn narrow_sum(weights: &[u128], bits: &BitString) -> u128 {
    weights.iter().zip(bits.iter()).filter(|(_, x)| *x).map(|(w, _)| *w).sum()
}

/// Exact `|c - Σ b_j x_j|`, cached into the chromosome.
pub fn fitness(ctx: &FitnessContext, ch: &mut Chromosome) -> Result<BigUint> {
    check_len(ctx.n(), ch.len())?;
    Ok(ch.evaluate(ctx).clone())
}
