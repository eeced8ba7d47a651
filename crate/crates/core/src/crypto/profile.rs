use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{arith::log2, PlainBlock, PublicKey};
use crate::{Error, Result};

/// Hardness covariates of one (key, block) instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceProfile {
    pub n: usize,
    pub density: f64,
    pub ones_proportion: f64,
}

/// `n / log2(max b_i)`.
pub fn density(pk: &PublicKey) -> Result<f64> {
    let max = pk.max_weight();
    if max.to_u8().is_some_and(|v| v < 2) {
        return Err(Error::DegenerateKey("largest public weight is below 2"));
    }
    Ok(pk.n() as f64 / log2(max))
}

pub fn ones_proportion(block: &PlainBlock) -> f64 {
    if block.is_empty() {
        return 0.0;
    }
    block.count_ones() as f64 / block.len() as f64
}

pub fn profile(pk: &PublicKey, block: &PlainBlock) -> Result<InstanceProfile> {
    super::check_len(pk.n(), block.len())?;
    Ok(InstanceProfile { n: pk.n(), density: density(pk)?, ones_proportion: ones_proportion(block) })
}
