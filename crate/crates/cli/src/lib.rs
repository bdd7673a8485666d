//! Configuration, orchestration and persistence behind the `mzk` binary.

pub mod assertions;
pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;

pub use config::{parse_config, ConfigErrors, Experiment, RunConfig};
pub use experiments::{run, RunOutput};
pub use plot::emit_plot_data;
