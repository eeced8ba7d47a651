use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;

use crate::{Error, Result};

/// Inclusive range of increments used when growing a super-increasing
/// sequence. Wider increments give larger elements and lower density.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRange {
    lo: BigUint,
    hi: BigUint,
}

impl GrowthRange {
    pub fn new(lo: BigUint, hi: BigUint) -> Result<Self> {
        if lo.is_zero() {
            return Err(Error::InvalidParameter("growth range lower bound must be positive".into()));
        }
        if lo > hi {
            return Err(Error::InvalidParameter("growth range is empty".into()));
        }
        Ok(GrowthRange { lo, hi })
    }

    /// `[1, 2^bits]`.
    pub fn up_to_bits(bits: u32) -> Self {
        GrowthRange { lo: BigUint::one(), hi: BigUint::one() << bits }
    }

    pub fn lo(&self) -> &BigUint {
        &self.lo
    }

    pub fn hi(&self) -> &BigUint {
        &self.hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_range(&self.lo, &(&self.hi + 1u32))
    }
}

impl Default for GrowthRange {
    fn default() -> Self {
        GrowthRange::up_to_bits(16)
    }
}

/// Positive integers, each strictly larger than the sum of its predecessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperIncreasingSequence(Vec<BigUint>);

impl SuperIncreasingSequence {
    pub fn new(elements: Vec<BigUint>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::ZeroLength);
        }
        let mut sum = BigUint::zero();
        for (i, a) in elements.iter().enumerate() {
            if a.is_zero() || *a <= sum {
                return Err(Error::InvalidKey(format!("element {} is not super-increasing", i + 1)));
            }
            sum += a;
        }
        Ok(SuperIncreasingSequence(elements))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[BigUint] {
        &self.0
    }

    pub fn sum(&self) -> BigUint {
        self.0.iter().sum()
    }

    /// Greedy subset-sum solve, scanning from the largest element down.
    /// Returns the selection vector and the leftover residue.
    pub fn solve_greedy(&self, target: &BigUint) -> (Vec<bool>, BigUint) {
        let mut rest = target.clone();
        let mut picks = vec![false; self.0.len()];
        for (i, a) in self.0.iter().enumerate().rev() {
            if rest >= *a {
                rest -= a;
                picks[i] = true;
            }
        }
        (picks, rest)
    }
}

/// `a_1` uniform in the growth range, then `a_i = Σ_{j<i} a_j + growth draw`.
pub fn gen_superincreasing<R: Rng + ?Sized>(
    n: usize,
    growth: &GrowthRange,
    rng: &mut R,
) -> Result<SuperIncreasingSequence> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    let mut sum = BigUint::zero();
    let mut elements = Vec::with_capacity(n);
    for _ in 0..n {
        let a = &sum + growth.sample(rng);
        sum += &a;
        elements.push(a);
    }
    Ok(SuperIncreasingSequence(elements))
}
