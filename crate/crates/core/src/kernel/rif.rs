use std::collections::BTreeMap;

use super::{AgentId, AgentKind, SimError};

/// Region → Institution → Facility hierarchy of live agents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RifTree {
    kind: BTreeMap<AgentId, AgentKind>,
    parent: BTreeMap<AgentId, AgentId>,
    children: BTreeMap<AgentId, Vec<AgentId>>,
}

impl RifTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: AgentId) -> bool {
        self.kind.contains_key(&id)
    }

    pub fn kind(&self, id: AgentId) -> Option<AgentKind> {
        self.kind.get(&id).copied()
    }

    pub fn parent(&self, id: AgentId) -> Option<AgentId> {
        self.parent.get(&id).copied()
    }

    pub fn children(&self, id: AgentId) -> &[AgentId] {
        self.children.get(&id).map_or(&[], |v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.kind.keys().copied()
    }

    /// Check that `kind` may be placed under `parent`.
    pub fn check_insert(&self, kind: AgentKind, parent: Option<AgentId>) -> Result<(), SimError> {
        match (kind.parent_kind(), parent) {
            (None, None) => Ok(()),
            (None, Some(p)) => Err(SimError::Rif(format!("a region cannot have a parent (got {p})"))),
            (Some(want), None) => Err(SimError::Rif(format!("a {kind} needs a {want} parent"))),
            (Some(want), Some(p)) => match self.kind(p) {
                None => Err(SimError::Rif(format!("parent {p} is not a live agent"))),
                Some(k) if k == want => Ok(()),
                Some(k) => Err(SimError::Rif(format!(
                    "a {kind} cannot be placed under {k} {p}; expected a {want}"
                ))),
            },
        }
    }

    pub fn insert(&mut self, id: AgentId, kind: AgentKind, parent: Option<AgentId>) -> Result<(), SimError> {
        if self.contains(id) {
            return Err(SimError::Rif(format!("agent {id} already in hierarchy")));
        }
        self.check_insert(kind, parent)?;
        self.kind.insert(id, kind);
        if let Some(p) = parent {
            self.parent.insert(id, p);
            self.children.entry(p).or_default().push(id);
        }
        Ok(())
    }

    pub fn remove(&mut self, id: AgentId) -> Result<(), SimError> {
        if !self.contains(id) {
            return Err(SimError::UnknownAgent(id));
        }
        if !self.children(id).is_empty() {
            return Err(SimError::HasChildren(id));
        }
        self.kind.remove(&id);
        self.children.remove(&id);
        if let Some(p) = self.parent.remove(&id) {
            if let Some(v) = self.children.get_mut(&p) {
                v.retain(|c| *c != id);
            }
        }
        Ok(())
    }

    /// Parent chain from `id` upwards, nearest first.
    pub fn ancestors(&self, id: AgentId) -> Vec<AgentId> {
        let mut out = Vec::new();
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn region_of(&self, id: AgentId) -> Option<AgentId> {
        std::iter::once(id)
            .chain(self.ancestors(id))
            .find(|a| self.kind(*a) == Some(AgentKind::Region))
    }

    pub fn institution_of(&self, id: AgentId) -> Option<AgentId> {
        std::iter::once(id)
            .chain(self.ancestors(id))
            .find(|a| self.kind(*a) == Some(AgentKind::Institution))
    }

    /// Walk the whole tree and report every broken invariant.
    pub fn audit(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (&id, &kind) in &self.kind {
            let parent = self.parent(id);
            if let Err(e) = self.check_insert(kind, parent) {
                problems.push(format!("agent {id}: {e}"));
            }
            if let Some(p) = parent {
                if !self.children(p).contains(&id) {
                    problems.push(format!("agent {id} missing from children of {p}"));
                }
            }
            if self.ancestors(id).len() > 2 {
                problems.push(format!("agent {id} is nested too deep"));
            }
        }
        for (&p, kids) in &self.children {
            for &c in kids {
                if self.parent(c) != Some(p) {
                    problems.push(format!("child {c} of {p} has a different parent"));
                }
            }
        }
        problems
    }
}
