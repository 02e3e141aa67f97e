//! Experiment drivers: condition-number sweeps and trajectory studies.

mod stats;
mod sweep;
mod trajectory;

pub use stats::{derive_seed, quantile};
pub use sweep::{emit, parse_csv, run_sweep, OutputFormat, SweepMetadata, SweepReport, SweepRow, SweepSpec, DEFAULT_SEED};
pub use trajectory::{run_trajectory, TrajectoryDataset, TrajectorySpec};
