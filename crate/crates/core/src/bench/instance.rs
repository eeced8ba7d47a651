use std::ops::RangeInclusive;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::crypto::files::{CiphertextFile, KeyFile};
use crate::crypto::{density, encrypt_bits, keygen, keygen_with, Ciphertext, GrowthRange, PrivateKey, PublicKey};
use crate::{BitString, Error, Result};

/// Keys drawn per density target before giving up.
pub const MAX_KEY_ATTEMPTS: usize = 2000;

/// A half-open interval `[lo, hi)` of densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRange {
    pub lo: f64,
    pub hi: f64,
}

impl DensityRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
            return Err(Error::InvalidParameter(format!("density range [{lo}, {hi}) is empty or invalid")));
        }
        Ok(DensityRange { lo, hi })
    }

    pub fn contains(&self, d: f64) -> bool {
        self.lo <= d && d < self.hi
    }

    /// The four buckets of the density comparison.
    pub fn buckets() -> Vec<DensityRange> {
        [(0.6, 0.7), (0.7, 0.8), (0.8, 0.9), (0.9, 1.0)].map(|(lo, hi)| DensityRange { lo, hi }).to_vec()
    }
}

impl std::fmt::Display for DensityRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

impl std::str::FromStr for DensityRange {
    type Err = Error;

    /// `"0.6-0.7"`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s.trim().split_once('-').ok_or_else(|| Error::Parse(format!("density range {s:?}")))?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("density range {s:?}")));
        DensityRange::new(num(lo)?, num(hi)?)
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub private_key: PrivateKey,
    pub public_key: PublicKey,
    /// `n·k` plaintext bits.
    pub message: BitString,
    pub ciphertext: Ciphertext,
}

/// What an attacker is handed: the public key and the ciphertext.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub key: KeyFile,
    pub ciphertext: CiphertextFile,
}

impl Instance {
    pub fn public_file(&self) -> InstanceFile {
        InstanceFile { key: KeyFile::from_public(&self.public_key), ciphertext: (&self.ciphertext).into() }
    }

    /// Canonical bytes of [`Self::public_file`].
    pub fn public_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.public_file()).expect("instance serialises")
    }
}

impl InstanceFile {
    pub fn parse(bytes: &[u8]) -> Result<(PublicKey, Ciphertext)> {
        let file: InstanceFile = serde_json::from_slice(bytes)?;
        Ok((file.key.public_key()?, file.ciphertext.try_into()?))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Growth bits that put `log2(max b)` near `n / d`: the top weight is
/// about `2^(n-1)` times the mean growth draw.
fn growth_bits_for(n: usize, d: f64) -> i64 {
    ((n as f64 / d) - n as f64 + 2.0).round() as i64
}

fn key_in_range<R: Rng + ?Sized>(n: usize, target: &DensityRange, rng: &mut R) -> Result<(PrivateKey, PublicKey)> {
    let mut bits = growth_bits_for(n, (target.lo + target.hi) / 2.0).max(1);
    let mut last = f64::NAN;
    for _ in 0..MAX_KEY_ATTEMPTS {
        let (sk, pk) = keygen_with(n, &GrowthRange::up_to_bits(bits as u32), rng)?;
        let Ok(d) = density(&pk) else { continue };
        last = d;
        if target.contains(d) {
            return Ok((sk, pk));
        }
        // steer the proposal towards the band
        if d >= target.hi {
            bits += 1;
        } else if bits > 1 {
            bits -= 1;
        }
    }
    Err(Error::TargetUnreachable {
        attempts: MAX_KEY_ATTEMPTS,
        detail: format!("no n = {n} key with density in [{}, {}); last sample {last:.4}", target.lo, target.hi),
    })
}

fn printable_ascii<R: Rng + ?Sized>(bits: usize, rng: &mut R) -> BitString {
    let bytes: Vec<u8> = (0..bits.div_ceil(8)).map(|_| rng.gen_range(0x20u8..=0x7e)).collect();
    let mut m = BitString::from_bytes(&bytes);
    m.truncate(bits);
    m
}

/// A block with a ones-count drawn uniformly from the counts allowed by
/// `target`, placed uniformly.
fn block_with_ones<R: Rng + ?Sized>(n: usize, target: &RangeInclusive<f64>, rng: &mut R) -> Result<BitString> {
    let allowed: Vec<usize> = (0..=n).filter(|&w| target.contains(&(w as f64 / n as f64))).collect();
    if allowed.is_empty() {
        return Err(Error::TargetUnreachable {
            attempts: 0,
            detail: format!("no {n}-bit block has a ones proportion in [{}, {}]", target.start(), target.end()),
        });
    }
    let ones = allowed[rng.gen_range(0..allowed.len())];
    let mut block = BitString::zeros(n);
    for i in index::sample(rng, n, ones) {
        block.set(i, true);
    }
    Ok(block)
}

/// A key (within the density band, if given) and a `k`-block message
/// (printable ASCII, or blocks with a ones proportion in `p_target`).
pub fn gen_instance<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    density_target: Option<&DensityRange>,
    p_target: Option<&RangeInclusive<f64>>,
    rng: &mut R,
) -> Result<Instance> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("n and k must be at least 1".into()));
    }
    let (private_key, public_key) = match density_target {
        Some(t) => key_in_range(n, t, rng)?,
        None => keygen(n, rng)?,
    };
    let message = match p_target {
        Some(t) => {
            let blocks = (0..k).map(|_| block_with_ones(n, t, rng)).collect::<Result<Vec<_>>>()?;
            BitString::concat(&blocks)
        }
        None => printable_ascii(n * k, rng),
    };
    let ciphertext = encrypt_bits(&public_key, &message);
    Ok(Instance { private_key, public_key, message, ciphertext })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{decrypt_block, ones_proportion};
    use crate::rng;

    #[test]
    fn density_band_is_honoured() {
        let mut r = rng::from_seed(1);
        for band in DensityRange::buckets() {
            for n in [24, 32] {
                let inst = gen_instance(n, 1, Some(&band), None, &mut r).unwrap();
                assert!(band.contains(density(&inst.public_key).unwrap()), "{band} n={n}");
            }
        }
    }

    #[test]
    fn unreachable_density_is_an_error() {
        let band = DensityRange::new(3.0, 4.0).unwrap();
        let err = gen_instance(8, 1, Some(&band), None, &mut rng::from_seed(2)).unwrap_err();
        assert!(matches!(err, Error::TargetUnreachable { .. }));
    }

    #[test]
    fn exact_ones_proportion() {
        let inst = gen_instance(32, 3, None, Some(&(0.25..=0.25)), &mut rng::from_seed(3)).unwrap();
        for block in inst.message.chunks_padded(32) {
            assert_eq!(block.count_ones(), 8);
            assert_eq!(ones_proportion(&block), 0.25);
        }
        assert!(gen_instance(10, 1, None, Some(&(0.33..=0.34)), &mut rng::from_seed(4)).is_err());
    }

    #[test]
    fn ascii_plaintext_decrypts() {
        let inst = gen_instance(24, 2, None, None, &mut rng::from_seed(5)).unwrap();
        assert_eq!(inst.message.len(), 48);
        assert!(inst.message.to_bytes().iter().all(|b| (0x20..=0x7e).contains(b)));
        let blocks: Vec<BitString> =
            inst.ciphertext.blocks.iter().map(|c| decrypt_block(&inst.private_key, c).unwrap()).collect();
        assert_eq!(BitString::concat(&blocks), inst.message);
    }

    #[test]
    fn public_bytes_round_trip_and_hash() {
        let inst = gen_instance(16, 2, None, None, &mut rng::from_seed(6)).unwrap();
        let bytes = inst.public_bytes();
        let (pk, ct) = InstanceFile::parse(&bytes).unwrap();
        assert_eq!(pk, inst.public_key);
        assert_eq!(ct, inst.ciphertext);
        assert_eq!(sha256_hex(&bytes), sha256_hex(&inst.public_bytes()));
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn ranges_parse() {
        let r: DensityRange = "0.6-0.7".parse().unwrap();
        assert_eq!(r, DensityRange { lo: 0.6, hi: 0.7 });
        assert!(r.contains(0.6) && !r.contains(0.7));
        assert!("0.7-0.6".parse::<DensityRange>().is_err());
        assert!("x".parse::<DensityRange>().is_err());
    }
}
