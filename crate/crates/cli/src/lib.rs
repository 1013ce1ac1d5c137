//! Configuration, presets and execution behind the `mrc` binary.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Settings, Solver};
pub use presets::{find, presets, Preset};
pub use run::{run, Outcome};
