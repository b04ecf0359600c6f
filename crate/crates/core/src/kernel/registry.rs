use std::collections::BTreeMap;

use super::{Agent, AgentKind, SimError, SimResult, World};
use crate::config::{ConfigNode, Field};

/// Builds an agent from its validated configuration.
pub type Factory = fn(&ConfigNode, &World) -> SimResult<Box<dyn Agent>>;

/// Everything the kernel needs to know about an archetype. Reference
/// archetypes and user additions register through the same structure.
#[derive(Clone)]
pub struct ArchetypeSpec {
    pub name: String,
    pub kind: AgentKind,
    pub schema: &'static [Field],
    pub factory: Factory,
}

impl std::fmt::Debug for ArchetypeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ArchetypeSpec")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ArchetypeRegistry {
    specs: BTreeMap<String, ArchetypeSpec>,
}

impl ArchetypeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, spec: ArchetypeSpec) -> SimResult<()> {
        if self.specs.contains_key(&spec.name) {
            return Err(SimError::DuplicateArchetype(spec.name));
        }
        self.specs.insert(spec.name.clone(), spec);
        Ok(())
    }

    pub fn get(&self, name: &str) -> SimResult<&ArchetypeSpec> {
        self.specs
            .get(name)
            .ok_or_else(|| SimError::UnknownArchetype(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.specs.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.specs.keys().map(String::as_str)
    }
}
