//! The Merkle-Hellman knapsack cipher.
//!
//! A private key is a super-increasing sequence `a`, a modulus `m > Σ a`, a
//! multiplier `w` coprime to `m` and a permutation `δ`. The public weights are
//! `b_i = a_{δ(i)} · w mod m`, and an n-bit block encrypts to the subset sum
//! of the weights selected by its one-bits.

mod arith;
pub mod files;
mod profile;
mod sequence;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub use arith::{abs_diff, log2, mod_inverse, ratio};
pub use profile::{density, ones_proportion, profile, InstanceProfile};
pub use sequence::{gen_superincreasing, GrowthRange, SuperIncreasingSequence};

use crate::{BitString, Error, Result};

/// One n-bit plaintext block.
pub type PlainBlock = BitString;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivateKey {
    a: SuperIncreasingSequence,
    m: BigUint,
    w: BigUint,
    /// 0-based: `delta[i]` is the index into `a` feeding public weight `i`.
    delta: Vec<usize>,
    w_inv: BigUint,
    public: PublicKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    b: Vec<BigUint>,
}

/// Block ciphertexts plus the unpadded message length in bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub n: usize,
    pub blocks: Vec<BigUint>,
    pub bit_length: usize,
}

impl PrivateKey {
    /// Assembles a key from its parts, checking every invariant.
    pub fn new(a: SuperIncreasingSequence, m: BigUint, w: BigUint, delta: Vec<usize>) -> Result<Self> {
        if m <= a.sum() {
            return Err(Error::InvalidKey("modulus must exceed the sequence sum".into()));
        }
        if w.is_zero() || w >= m || !w.gcd(&m).is_one() {
            return Err(Error::InvalidKey("multiplier must be a unit modulo m".into()));
        }
        if delta.len() != a.len() {
            return Err(Error::InvalidKey("permutation length differs from key length".into()));
        }
        let mut seen = vec![false; delta.len()];
        for &d in &delta {
            if d >= seen.len() || std::mem::replace(&mut seen[d], true) {
                return Err(Error::InvalidKey("delta is not a permutation".into()));
            }
        }
        let w_inv = mod_inverse(&w, &m)?;
        let public = PublicKey { b: delta.iter().map(|&d| (&a.as_slice()[d] * &w) % &m).collect() };
        Ok(PrivateKey { a, m, w, delta, w_inv, public })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn sequence(&self) -> &SuperIncreasingSequence {
        &self.a
    }

    pub fn modulus(&self) -> &BigUint {
        &self.m
    }

    pub fn multiplier(&self) -> &BigUint {
        &self.w
    }

    pub fn permutation(&self) -> &[usize] {
        &self.delta
    }

    /// `b_i = a_{delta(i)} * w mod m`.
    pub fn public_key(&self) -> PublicKey {
        self.public.clone()
    }
}

impl PublicKey {
    pub fn new(b: Vec<BigUint>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::ZeroLength);
        }
        Ok(PublicKey { b })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.b
    }

    pub fn max_weight(&self) -> &BigUint {
        self.b.iter().max().expect("public key is nonempty")
    }

    pub fn total(&self) -> BigUint {
        self.b.iter().sum()
    }

    /// Subset sum of the weights selected by `bits`; no length check.
    pub(crate) fn subset_sum(&self, bits: &BitString) -> BigUint {
        self.b.iter().zip(bits.iter()).filter(|(_, x)| *x).map(|(b, _)| b).sum()
    }
}

impl Ciphertext {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }
}

pub fn keygen<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<(PrivateKey, PublicKey)> {
    keygen_with(n, &GrowthRange::default(), rng)
}

/// Key generation with an explicit growth range. The modulus is
/// `Σ a + growth draw`, `w` is rejection-sampled from `[2, m-1]` until it is a
/// unit, and `δ` is a Fisher-Yates shuffle.
pub fn keygen_with<R: Rng + ?Sized>(n: usize, growth: &GrowthRange, rng: &mut R) -> Result<(PrivateKey, PublicKey)> {
    let a = gen_superincreasing(n, growth, rng)?;
    let m = a.sum() + growth.sample(rng);
    let w = loop {
        let two = BigUint::from(2u8);
        if m <= two {
            // only w = 1 is available
            break BigUint::one();
        }
        let w = rng.gen_biguint_range(&two, &m);
        if w.gcd(&m).is_one() {
            break w;
        }
    };
    let mut delta: Vec<usize> = (0..n).collect();
    delta.shuffle(rng);
    let sk = PrivateKey::new(a, m, w, delta)?;
    let pk = sk.public_key();
    Ok((sk, pk))
}

pub fn encrypt_block(pk: &PublicKey, block: &PlainBlock) -> Result<BigUint> {
    check_len(pk.n(), block.len())?;
    Ok(pk.subset_sum(block))
}

/// Splits the message into n-bit blocks (zero-padding the last) and encrypts
/// each independently.
pub fn encrypt_message(pk: &PublicKey, message: &[u8]) -> Ciphertext {
    encrypt_bits(pk, &BitString::from_bytes(message))
}

/// Same as [`encrypt_message`] for a message that is not byte-aligned.
pub fn encrypt_bits(pk: &PublicKey, bits: &BitString) -> Ciphertext {
    let blocks = bits.chunks_padded(pk.n()).iter().map(|b| pk.subset_sum(b)).collect();
    Ciphertext { n: pk.n(), blocks, bit_length: bits.len() }
}

/// Trapdoor decryption: `D = w⁻¹ c mod m`, greedy solve over `a`, then undo
/// the permutation. Anything that does not re-encrypt to `c` is rejected.
pub fn decrypt_block(sk: &PrivateKey, c: &BigUint) -> Result<PlainBlock> {
    let d = (c * &sk.w_inv) % &sk.m;
    let (e, residue) = sk.a.solve_greedy(&d);
    if !residue.is_zero() {
        return Err(Error::DecryptionFailure { residue: residue.to_string() });
    }
    let block = BitString::from_bits(sk.delta.iter().map(|&d| e[d]).collect());
    if sk.public.subset_sum(&block) != *c {
        return Err(Error::DecryptionFailure { residue: "0 (wrapped modulo m)".into() });
    }
    Ok(block)
}

/// Decrypts every block and strips the tail padding.
pub fn decrypt_message(sk: &PrivateKey, ct: &Ciphertext) -> Result<Vec<u8>> {
    if ct.n != sk.n() {
        return Err(Error::LengthMismatch { expected: sk.n(), actual: ct.n });
    }
    let blocks = ct.blocks.iter().map(|c| decrypt_block(sk, c)).collect::<Result<Vec<_>>>()?;
    let mut bits = BitString::concat(&blocks);
    bits.truncate(ct.bit_length);
    Ok(bits.to_bytes())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
