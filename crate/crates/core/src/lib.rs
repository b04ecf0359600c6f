//! Agent-based nuclear fuel cycle simulation.
//!
//! Facilities, institutions and regions trade discrete materials through a
//! market solved once per monthly step. Scenarios are declarative documents;
//! every material operation is recorded so histories can be replayed and
//! audited.

pub mod archetypes;
pub mod config;
pub mod exchange;
pub mod kernel;
pub mod output;
pub mod resources;
pub mod scenario;
pub mod toolkit;

pub use kernel::{AgentId, AgentKind, Engine, EngineConfig, SimError, SimResult};
pub use resources::{CompId, NuclideId, NuclideTable, ResourceId};
