//! Scenario files: parsing, validation, serialization, engine construction
//! and post-processing of the resulting output tables.

pub mod analysis;
mod build;
mod doc;

pub use doc::{
    Basis, Control, InitialFacility, InstitutionDef, ParseErrors, ProtoDef, RecipeDef, RegionDef,
    ScenarioDoc,
};

use std::path::Path;

use thiserror::Error;

use crate::config::ConfigError;
use crate::kernel::SimError;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", ParseErrors(.0.clone()))]
    Invalid(Vec<ConfigError>),
    /// The document is valid but the initial deployment failed.
    #[error("setup failed: {0}")]
    Setup(Box<SimError>),
    #[error("simulation failed: {0}")]
    Runtime(Box<SimError>),
}

impl ScenarioError {
    /// `true` for problems with the input rather than the engine.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, ScenarioError::Runtime(_))
    }
}

impl From<ParseErrors> for ScenarioError {
    fn from(e: ParseErrors) -> Self {
        ScenarioError::Invalid(e.0)
    }
}

/// Read and parse a scenario file.
pub fn load(path: &Path) -> Result<ScenarioDoc, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(ScenarioDoc::parse(&text)?)
}
