//! Crossover and mutation. Cut positions are 1-based, as in the usual
//! textbook pictures: a one-point cut `c` keeps bits `1..=c` and swaps
//! `c+1..=n`.

use rand::Rng;

use super::{Chromosome, GAParams};
use crate::crypto::check_len;
use crate::{BitString, Error, Result};

pub fn crossover_one_point(p1: &Chromosome, p2: &Chromosome, cut: usize) -> Result<(Chromosome, Chromosome)> {
    check_len(p1.len(), p2.len())?;
    let n = p1.len();
    if cut < 2 || cut + 1 > n {
        return Err(Error::CutOutOfRange(format!("one-point cut {cut} not in 2..={}", n.saturating_sub(1))));
    }
    Ok(swap_segment(p1, p2, cut, n))
}

pub fn crossover_two_point(
    p1: &Chromosome,
    p2: &Chromosome,
    cut1: usize,
    cut2: usize,
) -> Result<(Chromosome, Chromosome)> {
    check_len(p1.len(), p2.len())?;
    let n = p1.len();
    if cut1 < 1 || cut1 >= cut2 || cut2 > n {
        return Err(Error::CutOutOfRange(format!("two-point cuts ({cut1}, {cut2}) need 1 <= c1 < c2 <= {n}")));
    }
    Ok(swap_segment(p1, p2, cut1, cut2))
}

/// Children exchange the 0-based index range `from..to`.
fn swap_segment(p1: &Chromosome, p2: &Chromosome, from: usize, to: usize) -> (Chromosome, Chromosome) {
    let (a, b) = (p1.bits(), p2.bits());
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    for i in from..to {
        c1.set(i, b.get(i));
        c2.set(i, a.get(i));
    }
    (Chromosome::new(c1), Chromosome::new(c2))
}

/// Single child taking gene `i` from `p1` where `take_first[i]` is set and
/// from `p2` elsewhere.
pub fn crossover_uniform_masked(p1: &Chromosome, p2: &Chromosome, take_first: &BitString) -> Result<Chromosome> {
    check_len(p1.len(), p2.len())?;
    check_len(p1.len(), take_first.len())?;
    let bits =
        (0..p1.len()).map(|i| if take_first.get(i) { p1.bits().get(i) } else { p2.bits().get(i) }).collect::<Vec<_>>();
    Ok(Chromosome::new(bits.into()))
}

pub fn crossover_uniform<R: Rng + ?Sized>(p1: &Chromosome, p2: &Chromosome, rng: &mut R) -> Result<Chromosome> {
    let mask = BitString::random(p1.len(), rng);
    crossover_uniform_masked(p1, p2, &mask)
}

/// Complements the single gene at 1-based `position`.
pub fn mutate_at(ch: &Chromosome, position: usize) -> Result<Chromosome> {
    if position < 1 || position > ch.len() {
        return Err(Error::InvalidParameter(format!("mutation position {position} outside 1..={}", ch.len())));
    }
    let mut out = ch.clone();
    out.flip(position - 1);
    Ok(out)
}

/// With probability `p_m`, flips one uniformly chosen gene.
pub fn mutate<R: Rng + ?Sized>(ch: &Chromosome, params: &GAParams, rng: &mut R) -> Chromosome {
    let mut out = ch.clone();
    mutate_in_place(&mut out, params.p_m, rng);
    out
}

pub(crate) fn mutate_in_place<R: Rng + ?Sized>(ch: &mut Chromosome, p_m: f64, rng: &mut R) -> bool {
    if ch.is_empty() || !rng.gen_bool(p_m) {
        return false;
    }
    let i = rng.gen_range(0..ch.len());
    ch.flip(i);
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn ch(s: &str) -> Chromosome {
        Chromosome::new(s.parse().unwrap())
    }

    fn bits(c: &Chromosome) -> String {
        c.bits().to_string()
    }

    #[test]
    fn one_point_example() {
        let (c1, c2) = crossover_one_point(&ch("11101100"), &ch("01100111"), 5).unwrap();
        assert_eq!(bits(&c1), "11101111");
        assert_eq!(bits(&c2), "01100100");
    }

    #[test]
    fn two_point_example() {
        let (c1, c2) = crossover_two_point(&ch("11101100"), &ch("01100111"), 2, 6).unwrap();
        assert_eq!(bits(&c1), "11100100");
        assert_eq!(bits(&c2), "01101111");
    }

    #[test]
    fn uniform_example() {
        // mask picks the first parent at positions 1, 2, 5 and 8
        let mask: BitString = "11001001".parse().unwrap();
        let c = crossover_uniform_masked(&ch("11101100"), &ch("01100111"), &mask).unwrap();
        assert_eq!(bits(&c), "11101110");
    }

    #[test]
    fn mutation_example() {
        assert_eq!(bits(&mutate_at(&ch("11101100"), 2).unwrap()), "10101100");
        assert!(mutate_at(&ch("1010"), 0).is_err());
        assert!(mutate_at(&ch("1010"), 5).is_err());
    }

    #[test]
    fn degenerate_cuts() {
        let (p1, p2) = (ch("11101100"), ch("01100111"));
        let (c1, c2) = crossover_two_point(&p1, &p2, 1, 8).unwrap();
        // position 1 is outside the swapped segment 2..=8
        assert_eq!(bits(&c1), "11100111");
        assert_eq!(bits(&c2), "01101100");
        assert!(crossover_one_point(&p1, &p2, 1).is_err());
        assert!(crossover_one_point(&p1, &p2, 8).is_err());
        assert!(crossover_two_point(&p1, &p2, 3, 3).is_err());
        assert!(crossover_two_point(&p1, &p2, 0, 3).is_err());
        assert!(crossover_two_point(&p1, &p2, 2, 9).is_err());
        assert!(crossover_one_point(&p1, &ch("0110"), 2).is_err());
    }

    #[test]
    fn identical_parents_reproduce() {
        let p = ch("10110010");
        let (a, b) = crossover_one_point(&p, &p, 4).unwrap();
        assert_eq!((bits(&a), bits(&b)), (bits(&p), bits(&p)));
        let c = crossover_uniform(&p, &p, &mut rng::from_seed(1)).unwrap();
        assert_eq!(bits(&c), bits(&p));
    }

    #[test]
    fn zero_mutation_rate_is_identity() {
        let params = GAParams { p_m: 0.0, ..GAParams::default() };
        let mut r = rng::from_seed(2);
        let p = ch("10110010");
        for _ in 0..100 {
            assert_eq!(mutate(&p, &params, &mut r), p);
        }
    }

    fn bitstring(n: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), n).prop_map(BitString::from)
    }

    proptest! {
        #[test]
        fn crossovers_conserve_positional_bits(
            a in bitstring(16), b in bitstring(16), cut in 2usize..=15, c1 in 1usize..16, gap in 1usize..16, seed in any::<u64>()
        ) {
            let (p1, p2) = (Chromosome::new(a), Chromosome::new(b));
            let c2 = (c1 + gap).min(16);
            prop_assume!(c1 < c2);
            for (x, y) in [crossover_one_point(&p1, &p2, cut).unwrap(), crossover_two_point(&p1, &p2, c1, c2).unwrap()] {
                for i in 0..16 {
                    let mut parents = [p1.bits().get(i), p2.bits().get(i)];
                    let mut kids = [x.bits().get(i), y.bits().get(i)];
                    parents.sort();
                    kids.sort();
                    prop_assert_eq!(parents, kids);
                }
            }
            let child = crossover_uniform(&p1, &p2, &mut rng::from_seed(seed)).unwrap();
            for i in 0..16 {
                prop_assert!(child.bits().get(i) == p1.bits().get(i) || child.bits().get(i) == p2.bits().get(i));
            }
        }

        #[test]
        fn mutation_moves_at_most_one_bit(a in bitstring(20), seed in any::<u64>(), p_m in 0.0f64..=1.0) {
            let params = GAParams { p_m, ..GAParams::default() };
            let p = Chromosome::new(a);
            let out = mutate(&p, &params, &mut rng::from_seed(seed));
            prop_assert!(out.bits().hamming(p.bits()) <= 1);
        }
    }
}
