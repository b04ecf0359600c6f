//! Discrete resources: materials, products, compositions and decay.

mod composition;
mod decay;
mod matquery;
mod nuclide;
mod store;

pub use composition::{CompId, Composition, CompositionStore, AUTO_NORMALIZE_TOL, NORMALIZATION_TOL};
pub use decay::{bateman_last, decay_fractions, is_significant, DecayMode, SIGNIFICANCE_EPS};
pub use matquery::MatQuery;
pub use nuclide::{element_number, NuclideData, NuclideId, NuclideTable, NUCLIDE_DATA_ENV};
pub use store::{Resource, ResourceEvent, ResourceId, ResourceKind, ResourceOp, ResourceStore};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("invalid nuclide '{0}'")]
    InvalidNuclide(String),
    #[error("nuclide data: {0}")]
    NuclideData(String),
    #[error("empty composition")]
    EmptyComposition,
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("negative or non-finite quantity {0}")]
    BadQuantity(f64),
    #[error("split of {requested} out of range for resource {id} holding {available}")]
    SplitOutOfRange {
        id: ResourceId,
        requested: f64,
        available: f64,
    },
    #[error("unknown resource {0}")]
    UnknownResource(ResourceId),
    #[error("resource {0} is no longer alive")]
    DeadResource(ResourceId),
    #[error("cannot decay resource {id} backwards from {last} to {to}")]
    DecayBackwards { id: ResourceId, last: u64, to: u64 },
    #[error("incompatible resources {0} and {1}")]
    Incompatible(ResourceId, ResourceId),
    #[error("resource {0} is not a material")]
    NotMaterial(ResourceId),
}
