use num_bigint::BigUint;
use rand::Rng;

use super::fitness::narrow_sum;
use super::{Chromosome, FitnessContext};
use crate::crypto::abs_diff;

/// Randomized first-improvement hill climbing: up to `iters` times, flip a
/// random gene and keep the flip only if fitness strictly drops.
pub fn improve<R: Rng + ?Sized>(ctx: &FitnessContext, ch: &Chromosome, iters: usize, rng: &mut R) -> Chromosome {
    let n = ch.len();
    let mut bits = ch.bits().clone();
    if n == 0 || iters == 0 {
        let mut out = ch.clone();
        out.evaluate(ctx);
        return out;
    }
    let fitness = match ctx.narrow() {
        Some(nw) => {
            let w = &nw.weights;
            let mut sum = narrow_sum(w, &bits);
            let mut fit = nw.target.abs_diff(sum);
            for _ in 0..iters {
                if fit == 0 {
                    break;
                }
                let j = rng.gen_range(0..n);
                let cand = if bits.get(j) { sum - w[j] } else { sum + w[j] };
                let cand_fit = nw.target.abs_diff(cand);
                if cand_fit < fit {
                    bits.flip(j);
                    sum = cand;
                    fit = cand_fit;
                }
            }
            BigUint::from(fit)
        }
        None => {
            let w = ctx.public_key().weights();
            let mut sum = ctx.subset_sum(&bits);
            let mut fit = abs_diff(ctx.target(), &sum);
            for _ in 0..iters {
                if fit == BigUint::ZERO {
                    break;
                }
                let j = rng.gen_range(0..n);
                let cand = if bits.get(j) { &sum - &w[j] } else { &sum + &w[j] };
                let cand_fit = abs_diff(ctx.target(), &cand);
                if cand_fit < fit {
                    bits.flip(j);
                    sum = cand;
                    fit = cand_fit;
                }
            }
            fit
        }
    };
    Chromosome::with_fitness(bits, fitness)
}
