//! Simulation time, the agent registry and hierarchy, the per-step phase
//! schedule and agent lifecycle.

mod agent;
mod engine;
mod registry;
mod rif;
mod world;

pub use agent::{Agent, Ctx};
pub use engine::{Engine, EngineConfig, RunSummary, StepBalance};
pub use registry::{ArchetypeRegistry, ArchetypeSpec, Factory};
pub use rif::RifTree;
pub use world::{AgentInfo, Prototype, World};

use std::fmt;

use thiserror::Error;

use crate::config::ConfigError;
use crate::exchange::ExchangeError;
use crate::resources::ResourceError;
use crate::toolkit::ToolkitError;

/// Agent handle. Assigned in entry order and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentKind {
    Region,
    Institution,
    Facility,
}

impl AgentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Region => "Region",
            AgentKind::Institution => "Institution",
            AgentKind::Facility => "Facility",
        }
    }

    /// Kind a parent must have, or `None` for roots.
    pub fn parent_kind(self) -> Option<AgentKind> {
        match self {
            AgentKind::Region => None,
            AgentKind::Institution => Some(AgentKind::Region),
            AgentKind::Facility => Some(AgentKind::Institution),
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Monthly simulation clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimClock {
    step: u64,
    duration: u64,
}

impl SimClock {
    pub const MONTHS_PER_STEP: u64 = 1;

    pub fn new(duration: u64) -> Self {
        SimClock { step: 0, duration }
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn finished(&self) -> bool {
        self.step >= self.duration
    }

    pub(crate) fn advance(&mut self) {
        self.step += Self::MONTHS_PER_STEP;
    }
}

/// Phases executed in this order every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    /// Before the first step; initial deployments happen here.
    Init,
    Build,
    Tick,
    Exchange,
    Tock,
    Decommission,
    Done,
}

impl Phase {
    pub const SCHEDULE: [Phase; 5] =
        [Phase::Build, Phase::Tick, Phase::Exchange, Phase::Tock, Phase::Decommission];
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("prototype '{0}' is already registered")]
    DuplicatePrototype(String),
    #[error("unknown prototype '{0}'")]
    UnknownPrototype(String),
    #[error("unknown archetype '{0}'")]
    UnknownArchetype(String),
    #[error("archetype '{0}' is already registered")]
    DuplicateArchetype(String),
    #[error("invalid configuration: {}", join_errors(.0))]
    Config(Vec<ConfigError>),
    #[error("hierarchy violation: {0}")]
    Rif(String),
    #[error("deployment at month {at} outside the build phase of month {now}")]
    DeployTime { at: u64, now: u64 },
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("agent {0} has already exited")]
    AgentDead(AgentId),
    #[error("agent {0} is already being decommissioned")]
    AlreadyRetiring(AgentId),
    #[error("agent {0} still has live children")]
    HasChildren(AgentId),
    #[error("duplicate recipe '{0}'")]
    DuplicateRecipe(String),
    #[error("undefined recipe '{0}'")]
    UndefinedRecipe(String),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Exchange(#[from] ExchangeError),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
    #[error("{0}")]
    Archetype(String),
    #[error("month {step}, agent {agent} ({prototype}): {source}")]
    Context {
        step: u64,
        agent: AgentId,
        prototype: String,
        #[source]
        source: Box<SimError>,
    },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
}

fn join_errors(errs: &[ConfigError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<ConfigError> for SimError {
    fn from(e: ConfigError) -> Self {
        SimError::Config(vec![e])
    }
}

pub type SimResult<T> = Result<T, SimError>;
