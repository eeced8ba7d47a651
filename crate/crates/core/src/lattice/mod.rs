//! Lattice-reduction baseline: exact LLL and the two subset-sum embeddings.

mod attack;
mod basis;
mod lll;

pub use attack::{
    attack_block, attack_lll, attack_lll_until, build_basis, build_cjloss_basis, build_lo_basis, extract_solution,
    weight_scale, BasisKind, LatticeAttackOutcome,
};
pub use basis::LatticeBasis;
pub use lll::{lll_reduce, lll_reduce_until, ReductionParams};
