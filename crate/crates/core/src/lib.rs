//! Merkle-Hellman knapsack workbench.
//!
//! The crate implements the cipher itself ([`crypto`]), a block-parallel
//! genetic-algorithm attack with inter-island migration ([`ga`], [`pga`]),
//! an exact-arithmetic LLL baseline ([`lattice`]) and the seeded experiment
//! harness that compares them ([`bench`]).

pub mod bench;
pub mod bits;
pub mod crypto;
mod error;
pub mod ga;
pub mod lattice;
pub mod pga;
pub mod rng;

pub use bits::BitString;
pub use error::{Error, Result};
