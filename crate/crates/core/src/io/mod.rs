//! Configuration, snapshots and output records.

pub mod config;
pub mod records;
pub mod snapshot;

pub use config::{ExperimentConfig, Horizon, RawConfig};
pub use records::{fmt_f64, json_f64, json_line, trajectory_lines, Csv, OutputDir, RunManifest};
pub use snapshot::{parse_snapshot, read_snapshot, snapshot_string, write_snapshot, SNAPSHOT_VERSION};
