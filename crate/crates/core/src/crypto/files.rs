//! On-disk formats for keys and ciphertexts.
//!
//! Both are JSON documents. Integers that may exceed 64 bits are written as
//! decimal strings. `delta` is stored 1-based. A key file may omit the
//! private fields, in which case it only carries the public weights.

use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{Ciphertext, PrivateKey, PublicKey, SuperIncreasingSequence};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal::opt_vec")]
    pub a: Option<Vec<BigUint>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal::opt")]
    pub m: Option<BigUint>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "decimal::opt")]
    pub w: Option<BigUint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<usize>>,
    #[serde(with = "decimal::vec")]
    pub b: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiphertextFile {
    pub n: usize,
    pub k: usize,
    #[serde(with = "decimal::vec")]
    pub c: Vec<BigUint>,
    pub bit_length: usize,
}

impl KeyFile {
    pub fn from_keys(sk: &PrivateKey, pk: &PublicKey) -> Self {
        KeyFile {
            n: pk.n(),
            a: Some(sk.sequence().as_slice().to_vec()),
            m: Some(sk.modulus().clone()),
            w: Some(sk.multiplier().clone()),
            delta: Some(sk.permutation().iter().map(|d| d + 1).collect()),
            b: pk.weights().to_vec(),
        }
    }

    pub fn from_public(pk: &PublicKey) -> Self {
        KeyFile { n: pk.n(), a: None, m: None, w: None, delta: None, b: pk.weights().to_vec() }
    }

    pub fn public_key(&self) -> Result<PublicKey> {
        if self.b.len() != self.n {
            return Err(Error::Parse(format!("key file: n = {} but {} weights", self.n, self.b.len())));
        }
        PublicKey::new(self.b.clone())
    }

    /// Rebuilds and validates the private key; the stored public weights
    /// must agree with the ones it derives.
    pub fn private_key(&self) -> Result<PrivateKey> {
        let missing = || Error::Parse("key file has no private part".into());
        let a = SuperIncreasingSequence::new(self.a.clone().ok_or_else(missing)?)?;
        let delta = self
            .delta
            .as_ref()
            .ok_or_else(missing)?
            .iter()
            .map(|&d| d.checked_sub(1).ok_or_else(|| Error::InvalidKey("delta is 1-based".into())))
            .collect::<Result<Vec<_>>>()?;
        let sk = PrivateKey::new(a, self.m.clone().ok_or_else(missing)?, self.w.clone().ok_or_else(missing)?, delta)?;
        if sk.public_key().weights() != self.b.as_slice() {
            return Err(Error::InvalidKey("public weights do not match the private key".into()));
        }
        Ok(sk)
    }
}

impl From<&Ciphertext> for CiphertextFile {
    fn from(ct: &Ciphertext) -> Self {
        CiphertextFile { n: ct.n, k: ct.k(), c: ct.blocks.clone(), bit_length: ct.bit_length }
    }
}

impl TryFrom<CiphertextFile> for Ciphertext {
    type Error = Error;

    fn try_from(f: CiphertextFile) -> Result<Self> {
        if f.c.len() != f.k {
            return Err(Error::Parse(format!("ciphertext file: k = {} but {} blocks", f.k, f.c.len())));
        }
        if f.bit_length > f.n * f.k {
            return Err(Error::Parse("ciphertext file: bit_length exceeds n * k".into()));
        }
        Ok(Ciphertext { n: f.n, blocks: f.c, bit_length: f.bit_length })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Serde adapters writing `BigUint` as decimal strings.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    fn parse<E: serde::de::Error>(s: &str) -> Result<BigUint, E> {
        s.parse().map_err(|_| E::custom(format!("not a decimal integer: {s:?}")))
    }

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        parse(&String::deserialize(d)?)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|s| parse(s)).collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.collect_str(x),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
            Option::<String>::deserialize(d)?.map(|s| parse(&s)).transpose()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Vec<BigUint>>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::vec::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigUint>>, D::Error> {
            Option::<Vec<String>>::deserialize(d)?.map(|v| v.iter().map(|s| parse::<D::Error>(s)).collect()).transpose()
        }
    }
}
