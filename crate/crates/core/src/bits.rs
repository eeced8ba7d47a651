use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Fixed-length string of bits, position 0 first.
///
/// Serializes as a string of `0`/`1` characters.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        BitString(vec![true; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitString((0..len).map(|_| rng.gen::<bool>()).collect())
    }

    /// Bits of `bytes`, most significant bit of each byte first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitString(bytes.iter().flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect())
    }

    /// Packs bits MSB-first; a trailing partial byte is zero-filled.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| chunk.iter().enumerate().fold(0u8, |acc, (i, &bit)| acc | (u8::from(bit) << (7 - i))))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.0[i] = bit;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn complement(&self) -> Self {
        BitString(self.0.iter().map(|b| !b).collect())
    }

    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.len(), other.len(), "hamming distance needs equal lengths");
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitString>) -> Self {
        BitString(parts.into_iter().flat_map(|p| p.0.iter().copied()).collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        BitString(self.0[range].to_vec())
    }

    /// Splits into `width`-bit chunks, zero-padding the final one.
    pub fn chunks_padded(&self, width: usize) -> Vec<BitString> {
        assert!(width > 0);
        self.0
            .chunks(width)
            .map(|c| {
                let mut v = c.to_vec();
                v.resize(width, false);
                BitString(v)
            })
            .collect()
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
