use std::any::Any;
use std::collections::BTreeMap;

use super::buffer::ResBuf;
use crate::config::{element_z, ConfigNode, Field, FieldType, Range};
use crate::exchange::{
    Bid, BidPortfolio, CapacityConstraint, Market, Request, RequestPortfolio, Trade, TradeOrder,
};
use crate::kernel::{Agent, Ctx, SimError, SimResult, World};
use crate::resources::{NuclideId, ResourceId};

const TOL: f64 = 1e-9;

/// One output stream: per-element recovery efficiencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub commodity: String,
    pub efficiencies: BTreeMap<u32, f64>,
}

/// Reprocessing plant. Feed is processed first in, first out, limited by
/// the mass of one tracked element per month. Each stream takes its share
/// of the elements it lists; whatever remains goes to the leftover
/// commodity.
#[derive(Debug, Clone)]
pub struct Separations {
    pub feed: Vec<(String, f64)>,
    pub feed_capacity: f64,
    pub throughput: f64,
    pub throughput_element: u32,
    pub streams: Vec<Stream>,
    pub leftover: String,
    feedbuf: ResBuf,
    out: BTreeMap<String, ResBuf>,
}

const FEED: &[Field] = &[
    Field::one("commodity", FieldType::Commodity),
    Field::opt("preference", FieldType::Float(Range::Any)),
];

const EFFICIENCY: &[Field] = &[
    Field::one("element", FieldType::Element),
    Field::one("efficiency", FieldType::Float(Range::Fraction)),
];

const STREAM: &[Field] = &[
    Field::one("commodity", FieldType::Commodity),
    Field::one_or_more("recover", FieldType::Block(EFFICIENCY)),
];

pub(crate) const SEPARATIONS: &[Field] = &[
    Field::one_or_more("feed", FieldType::Block(FEED)),
    Field::opt("feed_capacity", FieldType::Float(Range::NonNegative)),
    Field::one("throughput", FieldType::Float(Range::NonNegative)),
    Field::opt("throughput_element", FieldType::Element),
    Field::one_or_more("stream", FieldType::Block(STREAM)),
    Field::one("leftover", FieldType::Commodity),
];

fn z_of(node: &ConfigNode, name: &str) -> SimResult<u32> {
    let s = node.req_str(name)?;
    element_z(&s).map_err(|m| SimError::Archetype(format!("{name}: {m}")))
}

impl Separations {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        let mut feed = Vec::new();
        for f in cfg.children_named("feed") {
            feed.push((f.req_str("commodity")?, f.opt_f64("preference", 1.0)?));
        }
        let mut streams = Vec::new();
        for s in cfg.children_named("stream") {
            let mut efficiencies = BTreeMap::new();
            for e in s.children_named("recover") {
                efficiencies.insert(z_of(e, "element")?, e.req_f64("efficiency")?);
            }
            streams.push(Stream { commodity: s.req_str("commodity")?, efficiencies });
        }
        let throughput_element = match cfg.child("throughput_element") {
            Some(_) => z_of(cfg, "throughput_element")?,
            None => 94,
        };
        Ok(Box::new(Separations {
            feed,
            feed_capacity: cfg.opt_f64("feed_capacity", f64::INFINITY)?,
            throughput: cfg.req_f64("throughput")?,
            throughput_element,
            streams,
            leftover: cfg.req_str("leftover")?,
            feedbuf: ResBuf::new(),
            out: BTreeMap::new(),
        }))
    }

    pub fn feed_held(&self, world: &World) -> f64 {
        self.feedbuf.quantity(&world.res)
    }

    pub fn stock(&self, world: &World, commodity: &str) -> f64 {
        self.out.get(commodity).map_or(0.0, |b| b.quantity(&world.res))
    }

    fn store(&mut self, ctx: &mut Ctx, commodity: &str, id: ResourceId) -> SimResult<()> {
        let now = ctx.now();
        self.out
            .entry(commodity.to_string())
            .or_default()
            .push(&mut ctx.world.res, id, now)
    }

    /// Run one piece of feed through every stream.
    fn separate(&mut self, ctx: &mut Ctx, mut rest: ResourceId) -> SimResult<()> {
        let now = ctx.now();
        for i in 0..self.streams.len() {
            let eff = self.streams[i].efficiencies.clone();
            let f = |n: NuclideId| eff.get(&n.z()).copied().unwrap_or(0.0);
            let (taken, left) = ctx.res().separate(rest, f, now)?;
            if let Some(t) = taken {
                let c = self.streams[i].commodity.clone();
                self.store(ctx, &c, t)?;
            }
            match left {
                Some(l) => rest = l,
                None => return Ok(()),
            }
        }
        let c = self.leftover.clone();
        self.store(ctx, &c, rest)
    }
}

impl Agent for Separations {
    fn requests(&mut self, ctx: &mut Ctx) -> SimResult<Vec<RequestPortfolio>> {
        let room = self.feed_capacity - self.feedbuf.quantity(&ctx.world.res);
        if room <= TOL {
            return Ok(Vec::new());
        }
        let mut port = RequestPortfolio::new();
        for (c, p) in &self.feed {
            port.push(Request::new(c.clone(), room).with_preference(*p));
        }
        if room.is_finite() {
            port = port.constrain(CapacityConstraint::unit(room));
        }
        Ok(vec![port])
    }

    fn bids(&mut self, ctx: &mut Ctx, market: &Market) -> SimResult<Vec<BidPortfolio>> {
        let mut out = Vec::new();
        for (commodity, buf) in &self.out {
            let held = buf.quantity(&ctx.world.res);
            if held <= TOL {
                continue;
            }
            let mut port = BidPortfolio::new();
            for r in market.requests_for(commodity) {
                if r.requester != ctx.id {
                    port.push(Bid::new(r.id, r.request.quantity.min(held)));
                }
            }
            if !port.is_empty() {
                out.push(port.constrain(CapacityConstraint::unit(held)));
            }
        }
        Ok(out)
    }

    fn provide(&mut self, ctx: &mut Ctx, order: &TradeOrder) -> SimResult<ResourceId> {
        let now = ctx.now();
        let buf = self.out.get_mut(&order.commodity).ok_or_else(|| {
            SimError::Archetype(format!("no '{}' in stock", order.commodity))
        })?;
        buf.take(&mut ctx.world.res, order.quantity, now)
    }

    fn accept(&mut self, ctx: &mut Ctx, trade: &Trade) -> SimResult<()> {
        let now = ctx.now();
        self.feedbuf.push(&mut ctx.world.res, trade.resource, now)
    }

    fn tock(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        let now = ctx.now();
        let z = self.throughput_element;
        let mut budget = self.throughput;
        while let Some(front) = self.feedbuf.pop_front() {
            let comp = ctx.world.res.observe(front, now)?;
            let qty = ctx.world.res.get(front)?.quantity;
            let tracked = qty * ctx.world.res.comps().get(comp).element_frac(z);
            if tracked <= budget + TOL {
                budget -= tracked;
                self.separate(ctx, front)?;
                continue;
            }
            if budget <= TOL {
                self.feedbuf.push_front(front);
                break;
            }
            let part = qty * budget / tracked;
            let (piece, rest) = ctx.res().split(front, part, now)?;
            self.feedbuf.push_front(rest);
            self.separate(ctx, piece)?;
            break;
        }
        Ok(())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
