//! File formats, configuration, spectral analysis and command
//! implementations around [`wavetank_core`].
//!
//! Every output file starts with a `#` line naming the crate version, the
//! SHA-256 of the resolved configuration and the RNG seed.

pub mod commands;
pub mod config;
pub mod io;
pub mod report;
pub mod setup;
pub mod spectrum;

use std::path::{Path, PathBuf};

pub use config::{parse_config, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("checkpoint not found: {0}")]
    MissingCheckpoint(PathBuf),
    #[error("malformed series: {0}")]
    MalformedSeries(String),
    #[error("series too short: {have} samples, need at least {need}")]
    TooShort { have: usize, need: usize },
    #[error(transparent)]
    Core(#[from] wavetank_core::Error),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
