//! Configuration files, parameter sweeps over both engines and comparison
//! reports.

pub mod config;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::{Engine, OutputFormat, SweepConfig};
pub use presets::{preset, PRESET_NAMES};
pub use report::{compare_report, CompareReport, Tolerances};
pub use sweep::{run_sweep, MetricRow, SweepOutput};
