//! Named, reproducible quantum Zeno experiments over `zeno-core`.
//!
//! ```text
//! zeno-lab <experiment> [--key value]... [--config file] [--out dir] [--svg]
//! ```

use std::path::PathBuf;

use thiserror::Error;
use zeno_core::ZenoError;

pub mod config;
pub mod experiments;
pub mod svg;
pub mod table;

pub use config::{parse_config, Cli, Experiment, ExperimentConfig, Params, Settings};
pub use experiments::{run_experiment, write_report, Check, Report};
pub use table::{emit_csv, ResultTable};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{experiment}: {source}")]
    Core {
        experiment: String,
        #[source]
        source: ZenoError,
    },
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

impl LabError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 2,
            _ => 1,
        }
    }
}
