use std::collections::BTreeMap;

use crate::kernel::AgentId;

/// Registry of live facilities and the commodity capacity each provides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommodityProducerManager {
    producers: BTreeMap<AgentId, Vec<(String, f64)>>,
}

impl CommodityProducerManager {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, agent: AgentId, commodity: &str, capacity: f64) {
        self.producers
            .entry(agent)
            .or_default()
            .push((commodity.to_string(), capacity));
    }

    pub fn unregister(&mut self, agent: AgentId) {
        self.producers.remove(&agent);
    }

    /// Total capacity currently registered for `commodity`.
    pub fn supply(&self, commodity: &str) -> f64 {
        self.supply_where(commodity, |_| true)
    }

    /// Capacity for `commodity` among producers accepted by `filter`.
    pub fn supply_where(&self, commodity: &str, filter: impl Fn(AgentId) -> bool) -> f64 {
        self.producers
            .iter()
            .filter(|(a, _)| filter(**a))
            .flat_map(|(_, v)| v.iter())
            .filter(|(c, _)| c == commodity)
            .map(|(_, cap)| cap)
            .sum()
    }

    pub fn producers_of<'a>(&'a self, commodity: &'a str) -> impl Iterator<Item = AgentId> + 'a {
        self.producers
            .iter()
            .filter(move |(_, v)| v.iter().any(|(c, _)| c == commodity))
            .map(|(a, _)| *a)
    }
}
