//! Configuration, experiment orchestration, sweeps, identity checks and
//! report emission behind the command-line tool.

pub mod config;
pub mod experiment;
pub mod fit;
pub mod identities;
pub mod output;
pub mod plot;
pub mod presets;
pub mod sweep;

use thiserror::Error;

pub use config::{Config, ConfigError};
pub use experiment::{run_experiment, RunOutput, RunSummary};
pub use identities::{IdentityLedger, IdentitySuite};
pub use presets::Preset;
pub use sweep::{run_sweep, SweepReport, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("strong-solution window ends at t = {t_window} ({reason}); need at least {needed}")]
    Window { t_window: f64, needed: f64, reason: String },
    #[error("run failed: {0}")]
    Run(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 2 for configuration problems, 1 for everything numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Window { .. } => 2,
            _ => 1,
        }
    }
}
