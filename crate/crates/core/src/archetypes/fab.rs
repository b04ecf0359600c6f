use std::any::Any;
use std::collections::BTreeMap;

use super::buffer::ResBuf;
use crate::config::{ConfigNode, Field, FieldType, Range};
use crate::exchange::{
    Bid, BidPortfolio, CapacityConstraint, Market, Request, RequestPortfolio, Trade, TradeOrder,
};
use crate::kernel::{Agent, Ctx, SimError, SimResult, World};
use crate::resources::{CompId, Composition, NuclideId, ResourceId, ResourceStore};

const TOL: f64 = 1e-9;

/// Fraction `f` of fissile stock such that `f·fiss + (1-f)·fill` matches
/// `target` in weighted fissile content. `None` when no mix in [0, 1] does.
pub fn blend_fraction(fiss: f64, fill: f64, target: f64) -> Option<f64> {
    let den = fiss - fill;
    if den.abs() < 1e-15 {
        return ((target - fill).abs() < 1e-12).then_some(0.0);
    }
    let f = (target - fill) / den;
    if (-1e-12..=1.0 + 1e-12).contains(&f) {
        Some(f.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Weighted fissile content `Σ w_i x_i` of a composition.
pub fn fissile_value(weights: &BTreeMap<NuclideId, f64>, comp: &Composition) -> f64 {
    weights.iter().map(|(n, w)| w * comp.mass_frac(*n)).sum()
}

/// Mixed-oxide fuel fabrication. Keeps a fissile stock and a filler stock
/// and blends them to match the weighted fissile content of a target
/// recipe, in whole batches only.
#[derive(Debug, Clone)]
pub struct Fab {
    pub fiss_commodity: String,
    pub fiss_capacity: f64,
    pub fiss_preference: f64,
    pub fill_commodity: String,
    pub fill_recipe: CompId,
    pub fill_capacity: f64,
    pub fill_preference: f64,
    pub outcommodity: String,
    pub target: CompId,
    pub batch_size: f64,
    pub weights: BTreeMap<NuclideId, f64>,
    fiss: ResBuf,
    fill: ResBuf,
    last_warning: Option<u64>,
}

const WEIGHT: &[Field] = &[
    Field::one("nuclide", FieldType::Nuclide),
    Field::one("value", FieldType::Float(Range::Any)),
];

pub(crate) const FAB: &[Field] = &[
    Field::one("fiss_commodity", FieldType::Commodity),
    Field::opt("fiss_capacity", FieldType::Float(Range::NonNegative)),
    Field::opt("fiss_preference", FieldType::Float(Range::Any)),
    Field::one("fill_commodity", FieldType::Commodity),
    Field::one("fill_recipe", FieldType::Recipe),
    Field::one("fill_capacity", FieldType::Float(Range::NonNegative)),
    Field::opt("fill_preference", FieldType::Float(Range::Any)),
    Field::one("outcommodity", FieldType::Commodity),
    Field::one("target_recipe", FieldType::Recipe),
    Field::one("batch_size", FieldType::Float(Range::Positive)),
    Field::many("weight", FieldType::Block(WEIGHT)),
];

fn default_weights() -> BTreeMap<NuclideId, f64> {
    ["U235", "Pu239", "Pu241"]
        .into_iter()
        .map(|s| (s.parse().expect("valid nuclide"), 1.0))
        .collect()
}

impl Fab {
    pub fn from_config(cfg: &ConfigNode, world: &World) -> SimResult<Box<dyn Agent>> {
        let mut weights = BTreeMap::new();
        for w in cfg.children_named("weight") {
            let n: NuclideId = w.req_str("nuclide")?.parse()?;
            weights.insert(n, w.req_f64("value")?);
        }
        if weights.is_empty() {
            weights = default_weights();
        }
        Ok(Box::new(Fab {
            fiss_commodity: cfg.req_str("fiss_commodity")?,
            fiss_capacity: cfg.opt_f64("fiss_capacity", f64::INFINITY)?,
            fiss_preference: cfg.opt_f64("fiss_preference", 1.0)?,
            fill_commodity: cfg.req_str("fill_commodity")?,
            fill_recipe: world.recipe(&cfg.req_str("fill_recipe")?)?,
            fill_capacity: cfg.req_f64("fill_capacity")?,
            fill_preference: cfg.opt_f64("fill_preference", 1.0)?,
            outcommodity: cfg.req_str("outcommodity")?,
            target: world.recipe(&cfg.req_str("target_recipe")?)?,
            batch_size: cfg.req_f64("batch_size")?,
            weights,
            fiss: ResBuf::homogeneous(),
            fill: ResBuf::homogeneous(),
            last_warning: None,
        }))
    }

    pub fn fissile_stock(&self, world: &World) -> f64 {
        self.fiss.quantity(&world.res)
    }

    pub fn filler_stock(&self, world: &World) -> f64 {
        self.fill.quantity(&world.res)
    }

    fn stock_value(&self, res: &mut ResourceStore, buf: &ResBuf, now: u64) -> SimResult<Option<f64>> {
        let Some(id) = buf.front() else { return Ok(None) };
        let comp = res.observe(id, now)?;
        Ok(Some(fissile_value(&self.weights, res.comps().get(comp))))
    }

    /// Current blend fraction, or `None` if a stock is empty or the target
    /// cannot be met.
    fn fraction(&mut self, ctx: &mut Ctx) -> SimResult<Option<f64>> {
        let now = ctx.now();
        let (Some(vf), Some(vl)) = (
            self.stock_value(&mut ctx.world.res, &self.fiss.clone(), now)?,
            self.stock_value(&mut ctx.world.res, &self.fill.clone(), now)?,
        ) else {
            return Ok(None);
        };
        let vt = fissile_value(&self.weights, ctx.world.res.comps().get(self.target));
        let f = blend_fraction(vf, vl, vt);
        if f.is_none() && self.last_warning != Some(now) {
            self.last_warning = Some(now);
            ctx.diagnostic(
                "unsatisfiable_target",
                format!("fissile value {vf}, filler {vl}, target {vt}"),
            );
        }
        Ok(f)
    }
}

impl Agent for Fab {
    fn requests(&mut self, ctx: &mut Ctx) -> SimResult<Vec<RequestPortfolio>> {
        let mut out = Vec::new();
        let room = self.fiss_capacity - self.fiss.quantity(&ctx.world.res);
        if room > TOL {
            out.push(RequestPortfolio::single(
                Request::new(self.fiss_commodity.clone(), room).with_preference(self.fiss_preference),
            ));
        }
        let room = self.fill_capacity - self.fill.quantity(&ctx.world.res);
        if room > TOL {
            out.push(RequestPortfolio::single(
                Request::new(self.fill_commodity.clone(), room)
                    .with_preference(self.fill_preference)
                    .with_target(self.fill_recipe),
            ));
        }
        Ok(out)
    }

    fn bids(&mut self, ctx: &mut Ctx, market: &Market) -> SimResult<Vec<BidPortfolio>> {
        if market.requests_for(&self.outcommodity).next().is_none() {
            return Ok(Vec::new());
        }
        let Some(f) = self.fraction(ctx)? else {
            return Ok(Vec::new());
        };
        let b = self.batch_size;
        let limit = |held: f64, share: f64| {
            if share <= 0.0 {
                f64::INFINITY
            } else {
                held / (share * b)
            }
        };
        let full = limit(self.fiss.quantity(&ctx.world.res), f)
            .min(limit(self.fill.quantity(&ctx.world.res), 1.0 - f));
        let n_full = (full + 1e-9).floor();
        if n_full < 1.0 {
            return Ok(Vec::new());
        }
        let mut port = BidPortfolio::new();
        for r in market.requests_for(&self.outcommodity) {
            if r.requester != ctx.id {
                port.push(Bid::new(r.id, b).with_offer(self.target));
            }
        }
        if port.is_empty() {
            return Ok(Vec::new());
        }
        Ok(vec![port.constrain(CapacityConstraint::unit(n_full * b))])
    }

    fn provide(&mut self, ctx: &mut Ctx, order: &TradeOrder) -> SimResult<ResourceId> {
        let f = self.fraction(ctx)?.ok_or_else(|| {
            SimError::Archetype("fabrication target became unsatisfiable".into())
        })?;
        let now = ctx.now();
        let q = order.quantity;
        let a = if f > 0.0 { Some(self.fiss.take(&mut ctx.world.res, f * q, now)?) } else { None };
        let b = if f < 1.0 {
            Some(self.fill.take(&mut ctx.world.res, q - f * q, now)?)
        } else {
            None
        };
        match (a, b) {
            (Some(a), Some(b)) => Ok(ctx.res().absorb(a, b, now)?),
            (Some(x), None) | (None, Some(x)) => Ok(x),
            (None, None) => unreachable!("f is in [0, 1]"),
        }
    }

    fn accept(&mut self, ctx: &mut Ctx, trade: &Trade) -> SimResult<()> {
        let now = ctx.now();
        if trade.commodity == self.fiss_commodity {
            self.fiss.push(&mut ctx.world.res, trade.resource, now)
        } else {
            self.fill.push(&mut ctx.world.res, trade.resource, now)
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
