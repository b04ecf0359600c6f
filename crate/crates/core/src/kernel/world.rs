use std::collections::{BTreeMap, BTreeSet};

use rand_chacha::ChaCha8Rng;

use super::{AgentId, AgentKind, Phase, RifTree, SimClock, SimError};
use crate::config::{ConfigNode, NameLookup};
use crate::output::{Recorder, TableKind};
use crate::resources::{CompId, ResourceStore};
use crate::toolkit::{CommodityProducerManager, SymbFunction};

/// Bookkeeping for one agent, kept after it exits.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentInfo {
    pub id: AgentId,
    pub kind: AgentKind,
    pub prototype: String,
    pub archetype: String,
    pub parent: Option<AgentId>,
    pub entered: u64,
    /// Scheduled exit month from the prototype lifetime.
    pub exit_at: Option<u64>,
    pub exited: Option<u64>,
    /// Decommissioning has started but inventory remains.
    pub retiring: bool,
}

impl AgentInfo {
    pub fn alive(&self) -> bool {
        self.exited.is_none()
    }
}

/// A named, configured archetype.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub name: String,
    pub archetype: String,
    pub kind: AgentKind,
    pub config: ConfigNode,
    pub lifetime: Option<u64>,
}

/// Simulation state shared by all agents.
#[derive(Debug)]
pub struct World {
    pub(crate) clock: SimClock,
    pub(crate) phase: Phase,
    pub res: ResourceStore,
    pub(crate) recorder: Recorder,
    pub rif: RifTree,
    pub(crate) agents: BTreeMap<AgentId, AgentInfo>,
    pub(crate) prototypes: BTreeMap<String, Prototype>,
    pub(crate) recipes: BTreeMap<String, CompId>,
    pub producers: CommodityProducerManager,
    pub(crate) demands: BTreeMap<(AgentId, String), SymbFunction>,
    pub(crate) deploy_queue: Vec<(String, AgentId, Option<u64>)>,
    pub(crate) sinks: BTreeSet<AgentId>,
    /// Seeded generator for archetypes that want randomness.
    pub rng: ChaCha8Rng,
}

impl World {
    pub fn now(&self) -> u64 {
        self.clock.step()
    }

    pub fn clock(&self) -> SimClock {
        self.clock
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn info(&self, id: AgentId) -> Option<&AgentInfo> {
        self.agents.get(&id)
    }

    pub fn agent_infos(&self) -> impl Iterator<Item = &AgentInfo> {
        self.agents.values()
    }

    pub fn alive_agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.agents.values().filter(|a| a.alive()).map(|a| a.id)
    }

    pub fn prototype(&self, name: &str) -> Option<&Prototype> {
        self.prototypes.get(name)
    }

    pub fn prototypes(&self) -> impl Iterator<Item = &Prototype> {
        self.prototypes.values()
    }

    pub fn recipe(&self, name: &str) -> Result<CompId, SimError> {
        self.recipes
            .get(name)
            .copied()
            .ok_or_else(|| SimError::UndefinedRecipe(name.to_string()))
    }

    pub fn recipes(&self) -> impl Iterator<Item = (&str, CompId)> {
        self.recipes.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_sink(&self, id: AgentId) -> bool {
        self.sinks.contains(&id)
    }

    /// Demand curve registered by a region for a commodity.
    pub fn set_demand(&mut self, region: AgentId, commodity: &str, f: SymbFunction) {
        self.demands.insert((region, commodity.to_string()), f);
    }

    pub fn demand(&self, region: AgentId, commodity: &str, t: u64) -> Option<f64> {
        self.demands
            .get(&(region, commodity.to_string()))
            .map(|f| f.eval(t as f64))
    }

    /// Append a diagnostic row.
    pub fn diagnostic(&mut self, agent: Option<AgentId>, kind: &str, message: impl Into<String>) {
        let message = message.into();
        log::debug!("month {} agent {:?} {kind}: {message}", self.now(), agent);
        let row = vec![
            self.now().to_string(),
            agent.map(|a| a.to_string()).unwrap_or_default(),
            kind.to_string(),
            message,
        ];
        self.recorder.record(TableKind::Diagnostics, row);
    }

    pub(crate) fn record(&mut self, kind: TableKind, row: Vec<String>) {
        self.recorder.record(kind, row);
    }
}

impl NameLookup for World {
    fn has_recipe(&self, name: &str) -> bool {
        self.recipes.contains_key(name)
    }

    fn has_prototype(&self, name: &str) -> bool {
        self.prototypes.contains_key(name)
    }
}
