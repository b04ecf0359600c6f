//! Reference archetypes for once-through and recycle fuel cycles.

mod buffer;
mod endpoints;
mod fab;
mod hierarchy;
mod reactor;
mod separations;

pub use buffer::ResBuf;
pub use endpoints::{Sink, Source};
pub use fab::{blend_fraction, fissile_value, Fab};
pub use hierarchy::{
    DeployInst, GrowthRegion, ManagerInst, NullInst, NullRegion, PlannedBuild, PrefRule,
    ProducerOption,
};
pub use reactor::{FuelEntry, Reactor, ReactorState};
pub use separations::{Separations, Stream};

use crate::kernel::{AgentKind, ArchetypeRegistry, ArchetypeSpec, Factory};
use crate::config::Field;

fn spec(name: &str, kind: AgentKind, schema: &'static [Field], factory: Factory) -> ArchetypeSpec {
    ArchetypeSpec { name: name.to_string(), kind, schema, factory }
}

/// Every reference archetype, keyed by the name used in scenario files.
pub fn standard_registry() -> ArchetypeRegistry {
    use AgentKind::*;
    let mut r = ArchetypeRegistry::new();
    let specs = [
        spec("Source", Facility, endpoints::SOURCE, Source::from_config),
        spec("Sink", Facility, endpoints::SINK, Sink::from_config),
        spec("Reactor", Facility, reactor::REACTOR, Reactor::from_config),
        spec("Separations", Facility, separations::SEPARATIONS, Separations::from_config),
        spec("FuelFab", Facility, fab::FAB, Fab::from_config),
        spec("NullInst", Institution, hierarchy::NULL_INST, NullInst::from_config),
        spec("DeployInst", Institution, hierarchy::DEPLOY_INST, DeployInst::from_config),
        spec("ManagerInst", Institution, hierarchy::MANAGER_INST, ManagerInst::from_config),
        spec("NullRegion", Region, hierarchy::NULL_REGION, NullRegion::from_config),
        spec("GrowthRegion", Region, hierarchy::GROWTH_REGION, GrowthRegion::from_config),
    ];
    for s in specs {
        r.register(s).expect("reference archetype names are unique");
    }
    r
}
