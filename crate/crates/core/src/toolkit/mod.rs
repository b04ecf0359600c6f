//! Helpers shared by archetypes: demand curves, deployment decisions and
//! enrichment arithmetic.

mod build;
mod commodity;
mod enrichment;
mod symb;

pub use build::{solve_build, BuildOption, BuildProblem};
pub use commodity::CommodityProducerManager;
pub use enrichment::{swu_required, value_fn, Assays, EnrichmentNeeds};
pub use symb::SymbFunction;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToolkitError {
    #[error("bad function: {0}")]
    BadFunction(String),
    #[error("bad build problem: {0}")]
    BadBuildProblem(String),
    #[error("no prototypes available to cover demand {0}")]
    InfeasibleBuild(f64),
    #[error("assays must satisfy 0 < tails < feed <= product < 1 (feed {feed}, product {product}, tails {tails})")]
    AssayOrder { feed: f64, product: f64, tails: f64 },
    #[error("bad quantity {0}")]
    BadQuantity(f64),
}
