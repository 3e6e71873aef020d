use thiserror::Error;

use crate::catalog::CatalogError;
use crate::config::ConfigError;
use crate::eval::EvalError;
use crate::events::EventError;
use crate::sim::SimError;
use crate::stats::StatsError;

/// Top-level error type for the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CoreError {
    /// True for failures caused by the environment (filesystem, streams)
    /// rather than by invalid data or configuration.
    pub fn is_io(&self) -> bool {
        matches!(self, CoreError::Io(_))
    }
}
