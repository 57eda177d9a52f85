//! File formats, scenario configuration and the command-line driver on top
//! of [`qdcav_core`].

pub mod checks;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::{AppError, ConfigError};
pub use scenario::{run_oracle, run_scenario, validate};
