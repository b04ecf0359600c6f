//! Regions and institutions.

use std::any::Any;
use std::collections::BTreeMap;

use crate::config::{ConfigNode, Field, FieldType, Range};
use crate::exchange::PrefArc;
use crate::kernel::{Agent, AgentId, Ctx, SimResult, World};
use crate::toolkit::{solve_build, BuildOption, BuildProblem, SymbFunction};

/// Multiply the preference of matching arcs by `factor`; zero vetoes them.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefRule {
    pub commodity: Option<String>,
    pub supplier: Option<String>,
    pub requester: Option<String>,
    pub factor: f64,
}

pub(crate) const PREF_RULE: &[Field] = &[
    Field::opt("commodity", FieldType::Commodity),
    Field::opt("supplier", FieldType::Text),
    Field::opt("requester", FieldType::Text),
    Field::one("factor", FieldType::Float(Range::NonNegative)),
];

impl PrefRule {
    fn parse(node: &ConfigNode) -> SimResult<Self> {
        Ok(PrefRule {
            commodity: node.opt_str("commodity"),
            supplier: node.opt_str("supplier"),
            requester: node.opt_str("requester"),
            factor: node.req_f64("factor")?,
        })
    }

    fn matches(&self, world: &World, arc: &PrefArc) -> bool {
        let proto_is = |id: AgentId, want: &Option<String>| match want {
            None => true,
            Some(p) => world.info(id).is_some_and(|i| &i.prototype == p),
        };
        self.commodity.as_ref().is_none_or(|c| c == &arc.commodity)
            && proto_is(arc.supplier, &self.supplier)
            && proto_is(arc.requester, &self.requester)
    }
}

fn parse_rules(cfg: &ConfigNode) -> SimResult<Vec<PrefRule>> {
    cfg.children_named("pref_rule").map(PrefRule::parse).collect()
}

fn apply_rules(rules: &[PrefRule], world: &World, arc: &PrefArc) -> f64 {
    rules
        .iter()
        .filter(|r| r.matches(world, arc))
        .fold(arc.preference, |p, r| p * r.factor)
}

/// Region without behavior beyond optional preference rules.
#[derive(Debug, Clone)]
pub struct NullRegion {
    pub rules: Vec<PrefRule>,
}

pub(crate) const NULL_REGION: &[Field] = &[Field::many("pref_rule", FieldType::Block(PREF_RULE))];

impl NullRegion {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        Ok(Box::new(NullRegion { rules: parse_rules(cfg)? }))
    }
}

impl Agent for NullRegion {
    fn adjust_pref(&self, _me: AgentId, world: &World, arc: &PrefArc) -> f64 {
        apply_rules(&self.rules, world, arc)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Region that publishes commodity demand curves for its institutions.
#[derive(Debug, Clone)]
pub struct GrowthRegion {
    pub demand: Vec<(String, SymbFunction)>,
    pub rules: Vec<PrefRule>,
}

const PIECE: &[Field] = &[
    Field::one("start", FieldType::Float(Range::Any)),
    Field::one("function", FieldType::Text),
    Field::one("params", FieldType::Text),
];

const GROWTH: &[Field] = &[
    Field::one("commodity", FieldType::Commodity),
    Field::one_or_more("piece", FieldType::Block(PIECE)),
];

pub(crate) const GROWTH_REGION: &[Field] = &[
    Field::one_or_more("growth", FieldType::Block(GROWTH)),
    Field::many("pref_rule", FieldType::Block(PREF_RULE)),
];

impl GrowthRegion {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        let mut demand = Vec::new();
        for g in cfg.children_named("growth") {
            let mut pieces = Vec::new();
            for p in g.children_named("piece") {
                let f = SymbFunction::from_params(&p.req_str("function")?, &p.req_str("params")?)?;
                pieces.push((p.req_f64("start")?, f));
            }
            demand.push((g.req_str("commodity")?, SymbFunction::piecewise(pieces)?));
        }
        Ok(Box::new(GrowthRegion { demand, rules: parse_rules(cfg)? }))
    }
}

impl Agent for GrowthRegion {
    fn enter(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        for (c, f) in &self.demand {
            ctx.world.set_demand(ctx.id, c, f.clone());
        }
        Ok(())
    }

    fn adjust_pref(&self, _me: AgentId, world: &World, arc: &PrefArc) -> f64 {
        apply_rules(&self.rules, world, arc)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Institution that only owns its initial facilities.
#[derive(Debug, Clone)]
pub struct NullInst {
    pub rules: Vec<PrefRule>,
}

pub(crate) const NULL_INST: &[Field] = NULL_REGION;

impl NullInst {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        Ok(Box::new(NullInst { rules: parse_rules(cfg)? }))
    }
}

impl Agent for NullInst {
    fn adjust_pref(&self, _me: AgentId, world: &World, arc: &PrefArc) -> f64 {
        apply_rules(&self.rules, world, arc)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedBuild {
    pub prototype: String,
    pub time: u64,
    pub number: u64,
    pub lifetime: Option<u64>,
}

/// Institution following a fixed deployment schedule.
#[derive(Debug, Clone)]
pub struct DeployInst {
    pub plan: Vec<PlannedBuild>,
    pub rules: Vec<PrefRule>,
}

const BUILD: &[Field] = &[
    Field::one("prototype", FieldType::Prototype),
    Field::one("time", FieldType::Int),
    Field::opt("number", FieldType::Int),
    Field::opt("lifetime", FieldType::Int),
];

pub(crate) const DEPLOY_INST: &[Field] = &[
    Field::many("build", FieldType::Block(BUILD)),
    Field::many("pref_rule", FieldType::Block(PREF_RULE)),
];

impl DeployInst {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        let mut plan = Vec::new();
        for b in cfg.children_named("build") {
            plan.push(PlannedBuild {
                prototype: b.req_str("prototype")?,
                time: b.req_u64("time")?,
                number: b.opt_u64("number")?.unwrap_or(1),
                lifetime: b.opt_u64("lifetime")?,
            });
        }
        Ok(Box::new(DeployInst { plan, rules: parse_rules(cfg)? }))
    }
}

impl Agent for DeployInst {
    fn enter(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        self.build(ctx)
    }

    fn build(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        let now = ctx.now();
        for b in self.plan.iter().filter(|b| b.time == now) {
            for _ in 0..b.number {
                ctx.deploy_with_lifetime(&b.prototype, b.lifetime)?;
            }
        }
        // Entries run once; an institution entering at month t must not
        // repeat them in the build phase of the same month.
        self.plan.retain(|b| b.time != now);
        Ok(())
    }

    fn adjust_pref(&self, _me: AgentId, world: &World, arc: &PrefArc) -> f64 {
        apply_rules(&self.rules, world, arc)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProducerOption {
    pub prototype: String,
    pub commodity: String,
    pub capacity: f64,
    pub cost: f64,
}

/// Institution that builds facilities to cover its region's demand,
/// choosing the cheapest mix with the build solver.
#[derive(Debug, Clone)]
pub struct ManagerInst {
    pub options: Vec<ProducerOption>,
    pub rules: Vec<PrefRule>,
}

const PRODUCER: &[Field] = &[
    Field::one("prototype", FieldType::Prototype),
    Field::one("commodity", FieldType::Commodity),
    Field::one("capacity", FieldType::Float(Range::Positive)),
    Field::opt("cost", FieldType::Float(Range::NonNegative)),
];

pub(crate) const MANAGER_INST: &[Field] = &[
    Field::one_or_more("producer", FieldType::Block(PRODUCER)),
    Field::many("pref_rule", FieldType::Block(PREF_RULE)),
];

impl ManagerInst {
    pub fn from_config(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
        let mut options = Vec::new();
        for p in cfg.children_named("producer") {
            options.push(ProducerOption {
                prototype: p.req_str("prototype")?,
                commodity: p.req_str("commodity")?,
                capacity: p.req_f64("capacity")?,
                cost: p.opt_f64("cost", 1.0)?,
            });
        }
        Ok(Box::new(ManagerInst { options, rules: parse_rules(cfg)? }))
    }

    /// Units of each option to build for `commodity` given its unmet demand.
    pub fn plan(&self, commodity: &str, unmet: f64) -> SimResult<Vec<(String, u64)>> {
        let opts: Vec<&ProducerOption> =
            self.options.iter().filter(|o| o.commodity == commodity).collect();
        let problem = BuildProblem::new(
            opts.iter()
                .map(|o| BuildOption { capacity: o.capacity, cost: o.cost })
                .collect(),
            unmet,
        );
        let y = solve_build(&problem)?;
        Ok(opts
            .iter()
            .zip(y)
            .filter(|(_, n)| *n > 0)
            .map(|(o, n)| (o.prototype.clone(), n))
            .collect())
    }
}

impl Agent for ManagerInst {
    fn build(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        let Some(region) = ctx.world.rif.region_of(ctx.id) else {
            return Ok(());
        };
        let now = ctx.now();
        let mut commodities: BTreeMap<&str, ()> = BTreeMap::new();
        for o in &self.options {
            commodities.insert(&o.commodity, ());
        }
        for c in commodities.keys() {
            let Some(demand) = ctx.world.demand(region, c, now) else { continue };
            let rif = &ctx.world.rif;
            let supply = ctx
                .world
                .producers
                .supply_where(c, |a| rif.region_of(a) == Some(region));
            let unmet = demand - supply;
            if unmet <= 1e-9 {
                continue;
            }
            for (proto, n) in self.plan(c, unmet)? {
                for _ in 0..n {
                    ctx.deploy(&proto)?;
                }
            }
        }
        Ok(())
    }

    fn adjust_pref(&self, _me: AgentId, world: &World, arc: &PrefArc) -> f64 {
        apply_rules(&self.rules, world, arc)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
