//! Facilities at the edges of a fuel cycle: a supply of fresh material and a
//! final repository.

use std::any::Any;

use crate::config::{ConfigNode, Field, FieldType, Range};
use crate::exchange::{
    Bid, BidPortfolio, CapacityConstraint, Market, Request, RequestPortfolio, Trade, TradeOrder,
};
use crate::kernel::{Agent, Ctx, SimResult, World};
use crate::resources::{CompId, ResourceId};

/// Creates material of a fixed recipe on demand, up to `capacity` kg per
/// month.
#[derive(Debug, Clone)]
pub struct Source {
    pub commodity: String,
    pub recipe: CompId,
    pub capacity: f64,
}

pub(crate) const SOURCE: &[Field] = &[
    Field::one("commodity", FieldType::Commodity),
    Field::one("recipe", FieldType::Recipe),
    Field::opt("capacity", FieldType::Float(Range::NonNegative)),
];

impl Source {
    pub fn from_config(cfg: &ConfigNode, world: &World) -> SimResult<Box<dyn Agent>> {
        Ok(Box::new(Source {
            commodity: cfg.req_str("commodity")?,
            recipe: world.recipe(&cfg.req_str("recipe")?)?,
            capacity: cfg.opt_f64("capacity", f64::INFINITY)?,
        }))
    }
}

impl Agent for Source {
    fn bids(&mut self, ctx: &mut Ctx, market: &Market) -> SimResult<Vec<BidPortfolio>> {
        let mut port = BidPortfolio::new();
        for r in market.requests_for(&self.commodity) {
            if r.requester == ctx.id {
                continue;
            }
            let q = r.request.quantity.min(self.capacity);
            // An unbounded request against an unbounded source has no
            // meaningful size.
            if q.is_finite() && q > 0.0 {
                port.push(Bid::new(r.id, q).with_offer(self.recipe));
            }
        }
        if port.is_empty() {
            return Ok(Vec::new());
        }
        if self.capacity.is_finite() {
            port = port.constrain(CapacityConstraint::unit(self.capacity));
        }
        Ok(vec![port])
    }

    fn provide(&mut self, ctx: &mut Ctx, order: &TradeOrder) -> SimResult<ResourceId> {
        let now = ctx.now();
        Ok(ctx.world.res.create_material(ctx.id, order.quantity, self.recipe, now)?)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Accepts any of its commodities, up to `capacity` kg per month, and keeps
/// them forever.
#[derive(Debug, Clone)]
pub struct Sink {
    pub commodities: Vec<(String, f64)>,
    pub capacity: f64,
    pub inventory: Vec<ResourceId>,
}

const SINK_COMMODITY: &[Field] = &[
    Field::one("name", FieldType::Commodity),
    Field::opt("preference", FieldType::Float(Range::Any)),
];

pub(crate) const SINK: &[Field] = &[
    Field::one_or_more("commodity", FieldType::Block(SINK_COMMODITY)),
    Field::opt("capacity", FieldType::Float(Range::NonNegative)),
];

impl Sink {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        let mut commodities = Vec::new();
        for c in cfg.children_named("commodity") {
            commodities.push((c.req_str("name")?, c.opt_f64("preference", 1.0)?));
        }
        Ok(Box::new(Sink {
            commodities,
            capacity: cfg.opt_f64("capacity", f64::INFINITY)?,
            inventory: Vec::new(),
        }))
    }

    pub fn held(&self, world: &World) -> f64 {
        self.inventory
            .iter()
            .filter_map(|id| world.res.get(*id).ok())
            .map(|r| r.quantity)
            .sum()
    }
}

impl Agent for Sink {
    fn requests(&mut self, _ctx: &mut Ctx) -> SimResult<Vec<RequestPortfolio>> {
        if self.capacity <= 0.0 {
            return Ok(Vec::new());
        }
        let mut port = RequestPortfolio::new();
        for (c, p) in &self.commodities {
            port.push(Request::new(c.clone(), self.capacity).with_preference(*p));
        }
        if self.capacity.is_finite() {
            port = port.constrain(CapacityConstraint::unit(self.capacity));
        }
        Ok(vec![port])
    }

    fn accept(&mut self, _ctx: &mut Ctx, trade: &Trade) -> SimResult<()> {
        self.inventory.push(trade.resource);
        Ok(())
    }

    fn is_sink(&self) -> bool {
        true
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
