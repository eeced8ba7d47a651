use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::worker::phi;
use crate::crypto::{encrypt_block, PublicKey};
use crate::ga::FitnessContext;
use crate::{BitString, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub samples: usize,
    /// Samples that some other block's Φ places closer to that block's
    /// solution than their own block's Φ places them to theirs.
    pub witnesses: usize,
    pub witnesses_per_block: Vec<usize>,
}

impl SensitivityReport {
    pub fn holds(&self) -> bool {
        self.witnesses > 0
    }
}

/// Perturbs each true block by a random number of bit flips drawn from
/// `flips`, `samples_per_block` times, and counts samples `m` of block `i`
/// with `|Φ_j(m) - Φ_j(m_j)| < |Φ_i(m) - Φ_i(m_i)|` for some `j ≠ i`.
pub fn sensitivity_probe<R: Rng + ?Sized>(
    pk: &PublicKey,
    blocks: &[BitString],
    samples_per_block: usize,
    flips: RangeInclusive<usize>,
    rng: &mut R,
) -> Result<SensitivityReport> {
    if blocks.len() < 2 {
        return Err(Error::InvalidParameter("the probe needs at least two blocks".into()));
    }
    if *flips.end() > pk.n() || flips.is_empty() {
        return Err(Error::InvalidParameter(format!("flip counts {flips:?} do not fit n = {}", pk.n())));
    }
    let key = Arc::new(pk.clone());
    let targets = blocks.iter().map(|b| encrypt_block(pk, b)).collect::<Result<Vec<_>>>()?;
    let contexts = FitnessContext::for_targets(key, &targets);
    let home: Vec<f64> = blocks.iter().zip(&contexts).map(|(b, ctx)| phi(ctx, b)).collect();

    let mut witnesses_per_block = vec![0; blocks.len()];
    for (i, block) in blocks.iter().enumerate() {
        for _ in 0..samples_per_block {
            let count = rng.gen_range(flips.clone());
            let mut m = block.clone();
            for p in index::sample(rng, pk.n(), count) {
                m.flip(p);
            }
            let own = (phi(&contexts[i], &m) - home[i]).abs();
            let elsewhere =
                (0..blocks.len()).filter(|&j| j != i).any(|j| (phi(&contexts[j], &m) - home[j]).abs() < own);
            if elsewhere {
                witnesses_per_block[i] += 1;
            }
        }
    }
    Ok(SensitivityReport {
        samples: samples_per_block * blocks.len(),
        witnesses: witnesses_per_block.iter().sum(),
        witnesses_per_block,
    })
}
