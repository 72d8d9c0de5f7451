//! Configuration, replica orchestration, persistence, replay and the
//! registry of named acceptance experiments.

pub mod config;
pub mod record;
pub mod registry;
pub mod run;

pub use config::{parse_config, ExperimentConfig, ExperimentKind};
pub use record::{ResultRecord, Stat};
pub use run::{replay, run_experiment, RunOutput};
