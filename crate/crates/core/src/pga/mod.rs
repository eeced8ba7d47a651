//! One island GA per ciphertext block, exchanging chromosomes that already
//! beat another island's whole population on that island's own objective.

mod attack;
mod bus;
mod config;
mod sensitivity;
mod worker;

pub use attack::{resemblance_ratio, run_attack, run_block_worker, AttackReport, BlockResult};
pub use bus::MigrationBus;
pub(crate) use config::secs;
pub use config::AttackConfig;
pub use sensitivity::{sensitivity_probe, SensitivityReport};
pub use worker::{
    integrate_migrants, migration_candidates, phi, BlockWorkerState, MigrationMessage, Snapshot, PHI_UNDEFINED,
};
