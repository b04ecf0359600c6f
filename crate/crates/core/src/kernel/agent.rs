use std::any::Any;

use super::{AgentId, Phase, SimError, SimResult, World};
use crate::exchange::{BidPortfolio, Market, PrefArc, RequestPortfolio, Trade, TradeOrder};
use crate::resources::{CompId, ResourceId, ResourceStore};

/// What an agent sees during a callback: its own id and the shared world.
pub struct Ctx<'a> {
    pub id: AgentId,
    pub world: &'a mut World,
}

impl Ctx<'_> {
    pub fn now(&self) -> u64 {
        self.world.now()
    }

    pub fn res(&mut self) -> &mut ResourceStore {
        &mut self.world.res
    }

    pub fn recipe(&self, name: &str) -> SimResult<CompId> {
        self.world.recipe(name)
    }

    pub fn diagnostic(&mut self, kind: &str, message: impl Into<String>) {
        self.world.diagnostic(Some(self.id), kind, message);
    }

    /// Ask the kernel to deploy `prototype` as a child of this agent.
    /// Only valid while building.
    pub fn deploy(&mut self, prototype: &str) -> SimResult<()> {
        self.deploy_with_lifetime(prototype, None)
    }

    /// Like [`Ctx::deploy`], overriding the prototype's lifetime.
    pub fn deploy_with_lifetime(&mut self, prototype: &str, lifetime: Option<u64>) -> SimResult<()> {
        match self.world.phase {
            Phase::Init | Phase::Build => {
                self.world
                    .deploy_queue
                    .push((prototype.to_string(), self.id, lifetime));
                Ok(())
            }
            _ => Err(SimError::DeployTime { at: self.now(), now: self.now() }),
        }
    }
}

/// Behavior of a region, institution or facility.
///
/// Every method has a do-nothing default so archetypes implement only the
/// roles they play.
pub trait Agent: Send {
    /// Called once right after deployment.
    fn enter(&mut self, _ctx: &mut Ctx) -> SimResult<()> {
        Ok(())
    }

    fn build(&mut self, _ctx: &mut Ctx) -> SimResult<()> {
        Ok(())
    }

    fn tick(&mut self, _ctx: &mut Ctx) -> SimResult<()> {
        Ok(())
    }

    fn requests(&mut self, _ctx: &mut Ctx) -> SimResult<Vec<RequestPortfolio>> {
        Ok(Vec::new())
    }

    /// Bids against the requests already posted to `market`.
    fn bids(&mut self, _ctx: &mut Ctx, _market: &Market) -> SimResult<Vec<BidPortfolio>> {
        Ok(Vec::new())
    }

    /// Adjusted preference for an arc whose requester sits below this agent.
    fn adjust_pref(&self, _me: AgentId, _world: &World, arc: &PrefArc) -> f64 {
        arc.preference
    }

    /// Produce a resource of exactly `order.quantity` owned by this agent.
    fn provide(&mut self, ctx: &mut Ctx, order: &TradeOrder) -> SimResult<ResourceId> {
        Err(SimError::Archetype(format!(
            "agent {} cannot supply '{}'",
            ctx.id, order.commodity
        )))
    }

    /// Receive a traded resource, already owned by this agent.
    fn accept(&mut self, _ctx: &mut Ctx, _trade: &Trade) -> SimResult<()> {
        Ok(())
    }

    fn tock(&mut self, _ctx: &mut Ctx) -> SimResult<()> {
        Ok(())
    }

    /// Dispose of inventory before exit; the kernel waits until nothing is
    /// held before removing the agent.
    fn prepare_exit(&mut self, _ctx: &mut Ctx) -> SimResult<()> {
        Ok(())
    }

    /// Commodity capacities registered with the producer manager.
    fn produces(&self) -> Vec<(String, f64)> {
        Vec::new()
    }

    /// Material held by a sink counts as disposed of.
    fn is_sink(&self) -> bool {
        false
    }

    fn as_any(&self) -> &dyn Any;
}
