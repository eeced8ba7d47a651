use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::basis::LatticeBasis;
use super::lll::{lll_reduce_until, ReductionParams};
use crate::crypto::{encrypt_block, Ciphertext, PlainBlock, PublicKey};
use crate::{BitString, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    LagariasOdlyzko,
    Cjloss,
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisKind::LagariasOdlyzko => "lagarias-odlyzko",
            BasisKind::Cjloss => "cjloss",
        })
    }
}

/// Smallest integer strictly above `sqrt(n)/2 + 1`, i.e. `1 + t` for the
/// least `t` with `4t² > n`.
pub fn weight_scale(n: usize) -> u64 {
    let mut t: u64 = 0;
    while 4 * t * t <= n as u64 {
        t += 1;
    }
    1 + t
}

fn embedding(pk: &PublicKey, c: &BigUint, last_row_head: BigRational) -> LatticeBasis {
    let n = pk.n();
    let scale = BigInt::from(weight_scale(n));
    let int = |x: &BigUint| BigRational::from_integer(BigInt::from(x.clone()) * &scale);
    let mut rows: Vec<Vec<BigRational>> = pk
        .weights()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut row = vec![BigRational::zero(); n + 1];
            row[i] = BigRational::one();
            row[n] = int(b);
            row
        })
        .collect();
    let mut last = vec![last_row_head; n + 1];
    last[n] = int(c);
    rows.push(last);
    LatticeBasis::trusted(rows)
}

/// Rows `(e_i, N b_i)` and `(0, …, 0, N c)`. Singular only for `c = 0`.
pub fn build_lo_basis(pk: &PublicKey, c: &BigUint) -> Result<LatticeBasis> {
    if c.is_zero() {
        return Err(Error::DependentBasis);
    }
    Ok(embedding(pk, c, BigRational::zero()))
}

/// Rows `(e_i, N b_i)` and `(1/2, …, 1/2, N c)`. Singular only for
/// `2c = Σ b`.
pub fn build_cjloss_basis(pk: &PublicKey, c: &BigUint) -> Result<LatticeBasis> {
    if c * 2u8 == pk.total() {
        return Err(Error::DependentBasis);
    }
    Ok(embedding(pk, c, BigRational::new(1.into(), 2.into())))
}

pub fn build_basis(kind: BasisKind, pk: &PublicKey, c: &BigUint) -> Result<LatticeBasis> {
    match kind {
        BasisKind::LagariasOdlyzko => build_lo_basis(pk, c),
        BasisKind::Cjloss => build_cjloss_basis(pk, c),
    }
}

fn decode(row: &[BigRational], kind: BasisKind, negate: bool) -> Option<PlainBlock> {
    let (head, last) = row.split_at(row.len() - 1);
    if !last[0].is_zero() {
        return None;
    }
    let half = BigRational::new(1.into(), 2.into());
    let bits = head
        .iter()
        .map(|x| {
            let x = if negate { -x } else { x.clone() };
            let x = match kind {
                BasisKind::LagariasOdlyzko => x,
                BasisKind::Cjloss => x + &half,
            };
            if x.is_zero() {
                Some(false)
            } else if x.is_one() {
                Some(true)
            } else {
                None
            }
        })
        .collect::<Option<Vec<bool>>>()?;
    Some(BitString::from_bits(bits))
}

/// First row (or negated row) of the reduced basis that has the solution
/// shape for `kind` and re-encrypts to `c`.
pub fn extract_solution(reduced: &LatticeBasis, pk: &PublicKey, c: &BigUint, kind: BasisKind) -> Option<PlainBlock> {
    if reduced.dimension().1 != pk.n() + 1 {
        return None;
    }
    reduced
        .rows()
        .iter()
        .flat_map(|row| [decode(row, kind, false), decode(row, kind, true)])
        .flatten()
        .find(|x| encrypt_block(pk, x).is_ok_and(|e| e == *c))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAttackOutcome {
    pub block_index: usize,
    pub solved: bool,
    pub candidate: Option<PlainBlock>,
    /// Reduced basis of the last embedding tried, if its reduction finished.
    pub reduced_basis: Option<LatticeBasis>,
    pub elapsed: Duration,
    /// The embedding that succeeded, or the last one tried.
    pub basis_kind: BasisKind,
    pub timed_out: bool,
}

/// CJLOSS first, then Lagarias-Odlyzko, on one block.
pub fn attack_block(
    pk: &PublicKey,
    c: &BigUint,
    params: &ReductionParams,
    deadline: Option<Instant>,
) -> Result<LatticeAttackOutcome> {
    let started = Instant::now();
    let mut outcome = LatticeAttackOutcome {
        block_index: 0,
        solved: false,
        candidate: None,
        reduced_basis: None,
        elapsed: Duration::ZERO,
        basis_kind: BasisKind::Cjloss,
        timed_out: false,
    };
    if c.is_zero() {
        // the all-zero block; the embeddings degenerate
        outcome.solved = true;
        outcome.candidate = Some(BitString::zeros(pk.n()));
        outcome.elapsed = started.elapsed();
        return Ok(outcome);
    }
    for kind in [BasisKind::Cjloss, BasisKind::LagariasOdlyzko] {
        outcome.basis_kind = kind;
        let Ok(basis) = build_basis(kind, pk, c) else { continue };
        let reduced = match lll_reduce_until(&basis, params, deadline) {
            Ok(r) => r,
            Err(Error::DeadlineExceeded) => {
                outcome.timed_out = true;
                outcome.reduced_basis = None;
                break;
            }
            Err(e) => return Err(e),
        };
        outcome.candidate = extract_solution(&reduced, pk, c, kind);
        outcome.reduced_basis = Some(reduced);
        if outcome.candidate.is_some() {
            outcome.solved = true;
            break;
        }
    }
    outcome.elapsed = started.elapsed();
    Ok(outcome)
}

/// Every block of `ct`, in order. Deterministic.
pub fn attack_lll(pk: &PublicKey, ct: &Ciphertext, params: &ReductionParams) -> Result<Vec<LatticeAttackOutcome>> {
    attack_lll_until(pk, ct, params, None)
}

pub fn attack_lll_until(
    pk: &PublicKey,
    ct: &Ciphertext,
    params: &ReductionParams,
    deadline: Option<Instant>,
) -> Result<Vec<LatticeAttackOutcome>> {
    if ct.n != pk.n() {
        return Err(Error::LengthMismatch { expected: pk.n(), actual: ct.n });
    }
    ct.blocks
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(LatticeAttackOutcome { block_index: i, ..attack_block(pk, c, params, deadline)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::lll::lll_reduce;
    use super::*;
    use crate::crypto::{density, encrypt_bits, keygen_with, GrowthRange, PublicKey};
    use crate::rng;

    fn key(b: &[u64]) -> PublicKey {
        PublicKey::new(b.iter().map(|&x| BigUint::from(x)).collect()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Every subset of the weights hitting `c`.
    fn witnesses(pk: &PublicKey, c: &BigUint) -> Vec<BitString> {
        let n = pk.n();
        (0u64..1 << n)
            .map(|mask| BitString::from_bits((0..n).map(|i| mask >> i & 1 == 1).collect()))
            .filter(|x| encrypt_block(pk, x).unwrap() == *c)
            .collect()
    }

    #[test]
    fn scale_is_the_least_integer_above_the_bound() {
        for n in 1..200usize {
            let bound = (n as f64).sqrt() / 2.0 + 1.0;
            let s = weight_scale(n) as f64;
            assert!(s > bound && s - 1.0 <= bound, "n = {n}");
        }
    }

    #[test]
    fn one_dimensional_lo_basis() {
        let pk = key(&[5]);
        let c = BigUint::from(5u8);
        let basis = build_lo_basis(&pk, &c).unwrap();
        assert_eq!(basis.rows(), &[vec![q(1, 1), q(10, 1)], vec![q(0, 1), q(10, 1)]]);
        let reduced = lll_reduce(&basis, &ReductionParams::default()).unwrap();
        assert_eq!(extract_solution(&reduced, &pk, &c, BasisKind::LagariasOdlyzko), Some("1".parse().unwrap()));
    }

    #[test]
    fn solution_images_are_short() {
        let pk = key(&[3, 7, 12, 30, 61, 125]);
        let x: BitString = "101101".parse().unwrap();
        let c = encrypt_block(&pk, &x).unwrap();
        let n = pk.n();
        for kind in [BasisKind::LagariasOdlyzko, BasisKind::Cjloss] {
            let basis = build_basis(kind, &pk, &c).unwrap();
            let mut v = vec![BigRational::zero(); n + 1];
            for row in basis.rows()[..n].iter().zip(x.iter()).filter(|(_, bit)| *bit).map(|(r, _)| r) {
                for (acc, e) in v.iter_mut().zip(row) {
                    *acc += e;
                }
            }
            for (acc, e) in v.iter_mut().zip(&basis.rows()[n]) {
                *acc -= e;
            }
            assert!(v[n].is_zero());
            let norm: BigRational = v.iter().map(|e| e * e).fold(BigRational::zero(), |s, t| s + t);
            match kind {
                BasisKind::LagariasOdlyzko => assert_eq!(norm, q(x.count_ones() as i64, 1)),
                BasisKind::Cjloss => assert_eq!(norm, q(n as i64, 4)),
            }
            assert_eq!(decode(&v, kind, false), Some(x.clone()));
        }
    }

    #[test]
    fn singular_embeddings_are_refused() {
        let pk = key(&[3, 7, 12, 30]);
        assert!(build_lo_basis(&pk, &BigUint::zero()).is_err());
        assert!(build_cjloss_basis(&pk, &BigUint::from(26u8)).is_err());
        assert!(build_cjloss_basis(&pk, &BigUint::from(25u8)).unwrap().gram_determinant() > BigRational::zero());
    }

    #[test]
    fn negated_rows_decode() {
        let pk = key(&[3, 7, 12, 30]);
        let x: BitString = "0110".parse().unwrap();
        let c = encrypt_block(&pk, &x).unwrap();
        let lo_row = vec![q(0, 1), q(-1, 1), q(-1, 1), q(0, 1), q(0, 1)];
        let cj_row = vec![q(1, 2), q(-1, 2), q(-1, 2), q(1, 2), q(0, 1)];
        let lo = LatticeBasis::new(vec![lo_row]).unwrap();
        let cj = LatticeBasis::new(vec![cj_row]).unwrap();
        assert_eq!(extract_solution(&lo, &pk, &c, BasisKind::LagariasOdlyzko), Some(x.clone()));
        assert_eq!(extract_solution(&cj, &pk, &c, BasisKind::Cjloss), Some(x));
    }

    #[test]
    fn unreachable_target_gives_nothing() {
        let pk = key(&[3, 7, 12, 30, 61]);
        let c = pk.total() + 1u8;
        for kind in [BasisKind::LagariasOdlyzko, BasisKind::Cjloss] {
            let reduced = lll_reduce(&build_basis(kind, &pk, &c).unwrap(), &ReductionParams::default()).unwrap();
            assert_eq!(extract_solution(&reduced, &pk, &c, kind), None);
        }
    }

    #[test]
    fn low_density_n8_is_solved_by_both_embeddings() {
        let mut r = rng::from_seed(21);
        let (_, pk) = keygen_with(8, &GrowthRange::up_to_bits(20), &mut r).unwrap();
        assert!(density(&pk).unwrap() < 0.5);
        for seed in 0..10u64 {
            let x = BitString::random(8, &mut rng::from_seed(seed));
            let c = encrypt_block(&pk, &x).unwrap();
            assert_eq!(witnesses(&pk, &c), vec![x.clone()]);
            for kind in [BasisKind::LagariasOdlyzko, BasisKind::Cjloss] {
                let reduced = lll_reduce(&build_basis(kind, &pk, &c).unwrap(), &ReductionParams::default()).unwrap();
                assert_eq!(extract_solution(&reduced, &pk, &c, kind).as_ref(), Some(&x), "{kind} seed {seed}");
            }
        }
    }

    #[test]
    fn attack_reports_per_block_and_verifies() {
        let mut r = rng::from_seed(31);
        let (_, pk) = keygen_with(16, &GrowthRange::up_to_bits(24), &mut r).unwrap();
        let bits = BitString::random(48, &mut r);
        let ct = encrypt_bits(&pk, &bits);
        let outcomes = attack_lll(&pk, &ct, &ReductionParams::default()).unwrap();
        assert_eq!(outcomes.len(), 3);
        for (o, c) in outcomes.iter().zip(&ct.blocks) {
            if let Some(x) = &o.candidate {
                assert!(o.solved);
                assert_eq!(encrypt_block(&pk, x).unwrap(), *c);
            }
        }
        assert!(outcomes.iter().any(|o| o.solved));
        let again = attack_lll(&pk, &ct, &ReductionParams::default()).unwrap();
        let strip =
            |v: &[LatticeAttackOutcome]| v.iter().map(|o| (o.candidate.clone(), o.basis_kind)).collect::<Vec<_>>();
        assert_eq!(strip(&outcomes), strip(&again));

        let empty = Ciphertext { blocks: vec![], bit_length: 0, ..ct };
        assert!(attack_lll(&pk, &empty, &ReductionParams::default()).unwrap().is_empty());
    }
}
