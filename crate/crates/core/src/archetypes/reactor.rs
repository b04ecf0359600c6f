use std::any::Any;
use std::collections::{BTreeMap, VecDeque};

use super::buffer::ResBuf;
use crate::config::{ConfigNode, Field, FieldType, Range};
use crate::exchange::{
    Bid, BidPortfolio, CapacityConstraint, Market, Request, RequestPortfolio, Trade, TradeOrder,
};
use crate::kernel::{Agent, Ctx, SimError, SimResult, World};
use crate::output::TableKind;
use crate::resources::{CompId, ResourceId};

const FILL_TOL: f64 = 1e-9;

/// One accepted fuel type and what it turns into.
#[derive(Debug, Clone, PartialEq)]
pub struct FuelEntry {
    pub incommodity: String,
    pub inrecipe: CompId,
    pub outcommodity: String,
    pub outrecipe: CompId,
    pub preference: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Batch {
    resource: ResourceId,
    quantity: f64,
    fuel: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactorState {
    /// Waiting for the first full core.
    Startup,
    Operating,
    /// A batch has been discharged; waiting for the refuel time to pass and
    /// the core to be full again.
    Refueling,
}

/// Batch reactor. Each cycle the oldest batch is discharged with its spent
/// recipe and replaced by fresh fuel.
#[derive(Debug, Clone)]
pub struct Reactor {
    pub fuel: Vec<FuelEntry>,
    pub n_batches: usize,
    pub batch_size: f64,
    pub cycle_time: u64,
    pub refuel_time: u64,
    pub power: f64,
    pub power_commodity: String,
    core: VecDeque<Batch>,
    outbox: BTreeMap<String, ResBuf>,
    state: ReactorState,
    cycle_step: u64,
    refuel_step: u64,
    discharged: usize,
}

const FUEL: &[Field] = &[
    Field::one("incommodity", FieldType::Commodity),
    Field::one("inrecipe", FieldType::Recipe),
    Field::one("outcommodity", FieldType::Commodity),
    Field::one("outrecipe", FieldType::Recipe),
    Field::opt("preference", FieldType::Float(Range::Any)),
];

pub(crate) const REACTOR: &[Field] = &[
    Field::one_or_more("fuel", FieldType::Block(FUEL)),
    Field::one("n_batches", FieldType::Int),
    Field::one("batch_size", FieldType::Float(Range::Positive)),
    Field::one("cycle_time", FieldType::Int),
    Field::opt("refuel_time", FieldType::Int),
    Field::opt("power", FieldType::Float(Range::NonNegative)),
    Field::opt("power_commodity", FieldType::Commodity),
];

impl Reactor {
    pub fn from_config(cfg: &ConfigNode, world: &World) -> SimResult<Box<dyn Agent>> {
        let mut fuel = Vec::new();
        for f in cfg.children_named("fuel") {
            fuel.push(FuelEntry {
                incommodity: f.req_str("incommodity")?,
                inrecipe: world.recipe(&f.req_str("inrecipe")?)?,
                outcommodity: f.req_str("outcommodity")?,
                outrecipe: world.recipe(&f.req_str("outrecipe")?)?,
                preference: f.opt_f64("preference", 1.0)?,
            });
        }
        let n_batches = cfg.req_u64("n_batches")? as usize;
        let cycle_time = cfg.req_u64("cycle_time")?;
        if n_batches == 0 || cycle_time == 0 {
            return Err(SimError::Archetype(
                "n_batches and cycle_time must be positive".into(),
            ));
        }
        Ok(Box::new(Reactor {
            fuel,
            n_batches,
            batch_size: cfg.req_f64("batch_size")?,
            cycle_time,
            refuel_time: cfg.opt_u64("refuel_time")?.unwrap_or(0),
            power: cfg.opt_f64("power", 1.0)?,
            power_commodity: cfg.opt_str("power_commodity").unwrap_or_else(|| "power".into()),
            core: VecDeque::new(),
            outbox: BTreeMap::new(),
            state: ReactorState::Startup,
            cycle_step: 0,
            refuel_step: 0,
            discharged: 0,
        }))
    }

    pub fn state(&self) -> ReactorState {
        self.state
    }

    /// Batches in the core, counting a partly filled one.
    pub fn core_batches(&self) -> usize {
        self.core.len()
    }

    pub fn core_mass(&self) -> f64 {
        self.core.iter().map(|b| b.quantity).sum()
    }

    pub fn batches_discharged(&self) -> usize {
        self.discharged
    }

    fn core_full(&self) -> bool {
        self.core.len() == self.n_batches
            && self.core.iter().all(|b| b.quantity >= self.batch_size - FILL_TOL)
    }

    fn is_generating(&self) -> bool {
        self.state == ReactorState::Operating && self.cycle_step >= 1
    }

    fn fuel_index(&self, commodity: &str) -> Option<usize> {
        self.fuel.iter().position(|f| f.incommodity == commodity)
    }

    fn portfolio(&self, qty: f64) -> RequestPortfolio {
        let reqs = self
            .fuel
            .iter()
            .map(|f| {
                Request::new(f.incommodity.clone(), qty)
                    .with_preference(f.preference)
                    .with_target(f.inrecipe)
            })
            .collect();
        RequestPortfolio::mutual(reqs, qty)
    }

    fn discharge(&mut self, ctx: &mut Ctx, batch: Batch) -> SimResult<()> {
        let entry = &self.fuel[batch.fuel];
        let now = ctx.now();
        let spent = ctx.res().transmute(batch.resource, entry.outrecipe, now)?;
        self.outbox
            .entry(entry.outcommodity.clone())
            .or_default()
            .push(&mut ctx.world.res, spent, now)?;
        self.discharged += 1;
        Ok(())
    }
}

impl Agent for Reactor {
    fn tick(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        if self.state == ReactorState::Operating && self.cycle_step >= self.cycle_time {
            if let Some(oldest) = self.core.pop_front() {
                self.discharge(ctx, oldest)?;
            }
            self.state = ReactorState::Refueling;
            self.refuel_step = 0;
        }
        Ok(())
    }

    fn requests(&mut self, _ctx: &mut Ctx) -> SimResult<Vec<RequestPortfolio>> {
        if self.state == ReactorState::Operating {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        if let Some(last) = self.core.back() {
            let room = self.batch_size - last.quantity;
            if room > FILL_TOL {
                out.push(self.portfolio(room));
            }
        }
        for _ in self.core.len()..self.n_batches {
            out.push(self.portfolio(self.batch_size));
        }
        Ok(out)
    }

    fn bids(&mut self, ctx: &mut Ctx, market: &Market) -> SimResult<Vec<BidPortfolio>> {
        let mut out = Vec::new();
        for (commodity, buf) in &self.outbox {
            let held = buf.quantity(&ctx.world.res);
            if held <= FILL_TOL {
                continue;
            }
            let offer = buf.front().and_then(|id| ctx.world.res.get(id).ok()?.comp());
            let mut port = BidPortfolio::new();
            for r in market.requests_for(commodity) {
                if r.requester == ctx.id {
                    continue;
                }
                let mut bid = Bid::new(r.id, r.request.quantity.min(held));
                if let Some(c) = offer {
                    bid = bid.with_offer(c);
                }
                port.push(bid);
            }
            if !port.is_empty() {
                out.push(port.constrain(CapacityConstraint::unit(held)));
            }
        }
        Ok(out)
    }

    fn provide(&mut self, ctx: &mut Ctx, order: &TradeOrder) -> SimResult<ResourceId> {
        let now = ctx.now();
        let buf = self.outbox.get_mut(&order.commodity).ok_or_else(|| {
            SimError::Archetype(format!("no '{}' in the discharge store", order.commodity))
        })?;
        buf.take(&mut ctx.world.res, order.quantity, now)
    }

    fn accept(&mut self, ctx: &mut Ctx, trade: &Trade) -> SimResult<()> {
        let fuel = self.fuel_index(&trade.commodity).ok_or_else(|| {
            SimError::Archetype(format!("unexpected fuel commodity '{}'", trade.commodity))
        })?;
        let now = ctx.now();
        let mut incoming = trade.resource;
        let mut left = trade.quantity;
        while left > FILL_TOL {
            let partial = self
                .core
                .back()
                .is_some_and(|b| b.quantity < self.batch_size - FILL_TOL);
            if !partial && self.core.len() >= self.n_batches {
                return Err(SimError::Archetype(format!(
                    "received {left} kg more fuel than the core holds"
                )));
            }
            let room = if partial {
                self.batch_size - self.core.back().map_or(0.0, |b| b.quantity)
            } else {
                self.batch_size
            };
            let piece = if left <= room + FILL_TOL {
                left = 0.0;
                incoming
            } else {
                let (piece, rest) = ctx.res().split(incoming, room, now)?;
                incoming = rest;
                left -= room;
                piece
            };
            let q = ctx.world.res.get(piece)?.quantity;
            if partial {
                let last = self.core.back_mut().expect("partial batch exists");
                last.resource = ctx.world.res.absorb(last.resource, piece, now)?;
                last.quantity += q;
            } else {
                self.core.push_back(Batch { resource: piece, quantity: q, fuel });
            }
        }
        Ok(())
    }

    fn tock(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        match self.state {
            ReactorState::Startup => {
                if self.core_full() {
                    self.state = ReactorState::Operating;
                    self.cycle_step = 1;
                }
            }
            ReactorState::Operating => self.cycle_step += 1,
            ReactorState::Refueling => {
                self.refuel_step += 1;
                if self.core_full() && self.refuel_step >= self.refuel_time {
                    self.state = ReactorState::Operating;
                    self.cycle_step = 0;
                }
            }
        }
        if self.is_generating() {
            let row = vec![ctx.now().to_string(), ctx.id.to_string(), self.power.to_string()];
            ctx.world.record(TableKind::Power, row);
        }
        Ok(())
    }

    fn prepare_exit(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        while let Some(b) = self.core.pop_front() {
            self.discharge(ctx, b)?;
        }
        self.state = ReactorState::Refueling;
        self.n_batches = 0;
        Ok(())
    }

    fn produces(&self) -> Vec<(String, f64)> {
        if self.power > 0.0 {
            vec![(self.power_commodity.clone(), self.power)]
        } else {
            Vec::new()
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
