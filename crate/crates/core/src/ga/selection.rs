use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{Chromosome, Population};

/// Selection weights for a minimisation problem, exact:
/// `g_i = max f - f_i + 1`, `p_i = g_i / Σ g`.
pub fn selection_probabilities_exact(fitness: &[BigUint]) -> Vec<BigRational> {
    let Some(max) = fitness.iter().max() else { return Vec::new() };
    let shifted: Vec<BigInt> = fitness.iter().map(|f| BigInt::from(max - f + 1u32)).collect();
    let total: BigInt = shifted.iter().sum();
    shifted.into_iter().map(|g| BigRational::new(g, total.clone())).collect()
}

pub fn selection_probabilities(fitness: &[BigUint]) -> Vec<f64> {
    let Some(max) = fitness.iter().max() else { return Vec::new() };
    let shifted: Vec<BigUint> = fitness.iter().map(|f| max - f + 1u32).collect();
    let total: BigUint = shifted.iter().sum();
    // keep both sides inside f64 range; the ratio only needs 53 bits
    let drop = total.bits().saturating_sub(960);
    let denom = (&total >> drop).to_f64().expect("bounded magnitude");
    shifted.iter().map(|g| (g >> drop).to_f64().expect("bounded magnitude") / denom).collect()
}

/// Cumulative intervals over `[0, 1)`; member `i` owns `[cum_{i-1}, cum_i)`.
#[derive(Debug, Clone)]
pub struct RouletteWheel {
    cumulative: Vec<f64>,
}

impl RouletteWheel {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        RouletteWheel { cumulative }
    }

    /// Index whose interval contains `u`. Rounding slack at the top end goes
    /// to the last member with nonzero width.
    pub fn pick(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.cumulative.len() {
            return i;
        }
        let last = self.cumulative.len() - 1;
        (1..=last).rev().find(|&j| self.cumulative[j] > self.cumulative[j - 1]).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }
}

/// `count` independent spins.
pub fn roulette_select<R: Rng + ?Sized>(
    members: &[Chromosome],
    probs: &[f64],
    count: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    assert_eq!(members.len(), probs.len(), "one probability per member");
    let wheel = RouletteWheel::new(probs);
    (0..count).map(|_| members[wheel.pick(rng.gen::<f64>())].clone()).collect()
}

/// Stochastic universal sampling: one offset in `[0, 1/count)`, then
/// `count` pointers spaced `1/count` apart.
pub fn sus_select<R: Rng + ?Sized>(
    members: &[Chromosome],
    probs: &[f64],
    count: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    assert_eq!(members.len(), probs.len(), "one probability per member");
    if count == 0 {
        return Vec::new();
    }
    let wheel = RouletteWheel::new(probs);
    let spacing = 1.0 / count as f64;
    let offset = rng.gen::<f64>() * spacing;
    (0..count).map(|i| members[wheel.pick(offset + i as f64 * spacing)].clone()).collect()
}

/// Keeps the `capacity` lowest-fitness members (ties by input order),
/// preserving their relative order.
pub fn elitist_select(pop: Population, capacity: usize) -> Population {
    let mut members = pop.into_members();
    assert!(members.len() >= capacity, "cannot select {capacity} from {}", members.len());
    let keep = lowest_indices(&members, capacity);
    let mut flags = vec![false; members.len()];
    for i in keep {
        flags[i] = true;
    }
    let mut it = flags.into_iter();
    members.retain(|_| it.next().unwrap());
    Population::from_members(members, capacity)
}

/// Indices of the `count` best members, stable on ties.
pub(crate) fn lowest_indices(members: &[Chromosome], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| members[a].fitness().cmp(members[b].fitness()));
    order.truncate(count);
    order
}
