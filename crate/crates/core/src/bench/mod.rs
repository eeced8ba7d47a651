mod campaign;
mod instance;
mod output;
mod spec;
mod stats;

pub use campaign::{
    aggregate, comparison_cell, run_comparison, run_density_campaign, run_table1_campaign, verify_message, CellStats,
    Comparison, ComparisonRecord, ComparisonSummary, DensityBucketRow, DensityTable, DensityTrial, Table1, Table1Trial,
};
pub use instance::{gen_instance, sha256_hex, DensityRange, Instance, InstanceFile, MAX_KEY_ATTEMPTS};
pub use output::{write_rows, Format};
pub use spec::{ExperimentSpec, GridAxis};
pub use stats::{stats, Summary};
