use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    Agent, AgentId, AgentInfo, AgentKind, ArchetypeRegistry, Ctx, Phase, Prototype, RifTree,
    SimClock, SimError, SimResult, World,
};
use crate::config::{self, ConfigError, ConfigNode};
use crate::exchange::{
    solve_exact_small, solve_greedy, solve_lp, ExchangeError, Market, SolverKind, Trade,
    TradeOrder, EXACT_MAX_ARCS, FLOW_TOL,
};
use crate::output::{OutputTables, Recorder, TableKind, FLUSH_INTERVAL};
use crate::resources::{
    CompId, DecayMode, NuclideId, NuclideTable, ResourceKind, ResourceStore,
};
use crate::toolkit::CommodityProducerManager;

/// Largest mismatch tolerated between an ordered and a provided quantity, kg.
pub const PROVIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub duration: u64,
    pub seed: u64,
    pub decay: DecayMode,
    pub solver: SolverKind,
    pub dump_exchange: bool,
    /// Directory for periodic flushes; `None` keeps tables in memory only.
    pub output_dir: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            duration: 1,
            seed: 0,
            decay: DecayMode::Manual,
            solver: SolverKind::Greedy,
            dump_exchange: false,
            output_dir: None,
        }
    }
}

/// Mass ledger at the end of one step, kg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBalance {
    pub time: u64,
    pub created: f64,
    pub live: f64,
    pub sunk: f64,
}

impl StepBalance {
    /// `(created - live - sunk) / max(created, 1)`
    pub fn relative_error(&self) -> f64 {
        (self.created - self.live - self.sunk).abs() / self.created.max(1.0)
    }
}

/// Counters tracked during the run, independently of the output tables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    /// System plutonium inventory at the end of each step, kg.
    pub pu_series: Vec<f64>,
    pub balances: Vec<StepBalance>,
    pub trades: usize,
    pub traded_mass: BTreeMap<String, f64>,
}

/// Owns the world and the agents and drives the phase schedule.
pub struct Engine {
    world: World,
    agents: Vec<Option<Box<dyn Agent>>>,
    registry: ArchetypeRegistry,
    config: EngineConfig,
    summary: RunSummary,
    next_transaction: u64,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("step", &self.world.now())
            .field("agents", &self.world.agents.len())
            .finish()
    }
}

impl Engine {
    pub fn new(config: EngineConfig, registry: ArchetypeRegistry, table: Arc<NuclideTable>) -> Self {
        let world = World {
            clock: SimClock::new(config.duration),
            phase: Phase::Init,
            res: ResourceStore::new(table, config.decay),
            recorder: Recorder::new(config.output_dir.clone()),
            rif: RifTree::new(),
            agents: BTreeMap::new(),
            prototypes: BTreeMap::new(),
            recipes: BTreeMap::new(),
            producers: CommodityProducerManager::new(),
            demands: BTreeMap::new(),
            deploy_queue: Vec::new(),
            sinks: BTreeSet::new(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        };
        let mut world = world;
        for (k, v) in [
            ("duration", config.duration.to_string()),
            ("seed", config.seed.to_string()),
            ("decay", config.decay.as_str().to_string()),
            ("solver", config.solver.as_str().to_string()),
        ] {
            world.record(TableKind::Info, vec![k.to_string(), v]);
        }
        Engine {
            world,
            agents: Vec::new(),
            registry,
            config,
            summary: RunSummary::default(),
            next_transaction: 0,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn registry(&self) -> &ArchetypeRegistry {
        &self.registry
    }

    pub fn summary(&self) -> &RunSummary {
        &self.summary
    }

    pub fn tables(&self) -> &OutputTables {
        self.world.recorder.tables()
    }

    pub fn agent(&self, id: AgentId) -> Option<&dyn Agent> {
        self.agents.get(id.0 as usize).and_then(|a| a.as_deref())
    }

    /// Downcast a live agent to its concrete archetype.
    pub fn agent_as<T: 'static>(&self, id: AgentId) -> Option<&T> {
        self.agent(id).and_then(|a| a.as_any().downcast_ref::<T>())
    }

    /// Intern a named recipe. Inputs slightly off normalization are
    /// renormalized with a diagnostic.
    pub fn add_recipe(&mut self, name: &str, fractions: Vec<(NuclideId, f64)>) -> SimResult<CompId> {
        if self.world.recipes.contains_key(name) {
            return Err(SimError::DuplicateRecipe(name.to_string()));
        }
        let (comp, warning) = self.world.res.comps_mut().intern_input(fractions)?;
        if let Some(w) = warning {
            self.world.diagnostic(None, "normalized", format!("recipe {name}: {w}"));
        }
        self.world.recipes.insert(name.to_string(), comp);
        Ok(comp)
    }

    pub fn register_prototype(
        &mut self,
        name: &str,
        archetype: &str,
        config: ConfigNode,
        lifetime: Option<u64>,
    ) -> SimResult<()> {
        if self.world.prototypes.contains_key(name) {
            return Err(SimError::DuplicatePrototype(name.to_string()));
        }
        let spec = self.registry.get(archetype)?;
        let path = format!("prototype[{name}]/{archetype}");
        let mut errs = Vec::new();
        config::validate(&config, spec.schema, &path, &self.world, &mut errs);
        if !errs.is_empty() {
            return Err(SimError::Config(errs));
        }
        // Trial construction catches semantic errors the schema cannot express.
        if let Err(e) = (spec.factory)(&config, &self.world) {
            return Err(match e {
                SimError::Config(es) => SimError::Config(es.into_iter().map(|c| c.within(&path)).collect()),
                other => SimError::Config(vec![ConfigError::new(path, other.to_string())]),
            });
        }
        let kind = spec.kind;
        self.world.prototypes.insert(
            name.to_string(),
            Prototype {
                name: name.to_string(),
                archetype: archetype.to_string(),
                kind,
                config,
                lifetime,
            },
        );
        Ok(())
    }

    /// Deploy an agent during the build phase of month `at`.
    pub fn deploy(&mut self, prototype: &str, parent: Option<AgentId>, at: u64) -> SimResult<AgentId> {
        let now = self.world.now();
        if at != now || !matches!(self.world.phase, Phase::Init | Phase::Build) {
            return Err(SimError::DeployTime { at, now });
        }
        let id = self.deploy_one(prototype, parent, None)?;
        self.drain_deploys()?;
        Ok(id)
    }

    fn deploy_one(
        &mut self,
        prototype: &str,
        parent: Option<AgentId>,
        lifetime: Option<u64>,
    ) -> SimResult<AgentId> {
        let proto = self
            .world
            .prototypes
            .get(prototype)
            .ok_or_else(|| SimError::UnknownPrototype(prototype.to_string()))?
            .clone();
        self.world.rif.check_insert(proto.kind, parent)?;
        let spec = self.registry.get(&proto.archetype)?;
        let agent = (spec.factory)(&proto.config, &self.world)?;
        let id = AgentId(self.agents.len() as u32);
        let now = self.world.now();
        let lifetime = lifetime.or(proto.lifetime);
        self.world.rif.insert(id, proto.kind, parent)?;
        self.world.agents.insert(
            id,
            AgentInfo {
                id,
                kind: proto.kind,
                prototype: proto.name.clone(),
                archetype: proto.archetype.clone(),
                parent,
                entered: now,
                exit_at: lifetime.map(|l| now + l),
                exited: None,
                retiring: false,
            },
        );
        self.world.record(
            TableKind::AgentEntry,
            vec![
                id.to_string(),
                proto.kind.as_str().to_string(),
                proto.name.clone(),
                proto.archetype.clone(),
                parent.map(|p| p.to_string()).unwrap_or_default(),
                now.to_string(),
                lifetime.map(|l| l.to_string()).unwrap_or_default(),
            ],
        );
        for (commodity, cap) in agent.produces() {
            self.world.producers.register(id, &commodity, cap);
        }
        if agent.is_sink() {
            self.world.sinks.insert(id);
        }
        log::debug!("month {now}: deployed {} as agent {id}", proto.name);
        self.agents.push(Some(agent));
        self.call(id, |a, ctx| a.enter(ctx))?;
        Ok(id)
    }

    fn drain_deploys(&mut self) -> SimResult<()> {
        while !self.world.deploy_queue.is_empty() {
            let queue = std::mem::take(&mut self.world.deploy_queue);
            for (proto, parent, lifetime) in queue {
                self.deploy_one(&proto, Some(parent), lifetime)
                    .map_err(|e| self.context(parent, e))?;
            }
        }
        Ok(())
    }

    fn context(&self, id: AgentId, e: SimError) -> SimError {
        if matches!(e, SimError::Context { .. }) {
            return e;
        }
        SimError::Context {
            step: self.world.now(),
            agent: id,
            prototype: self
                .world
                .info(id)
                .map(|i| i.prototype.clone())
                .unwrap_or_default(),
            source: Box::new(e),
        }
    }

    /// Run a callback on one agent with the world borrowed mutably.
    fn call<R>(
        &mut self,
        id: AgentId,
        f: impl FnOnce(&mut dyn Agent, &mut Ctx) -> SimResult<R>,
    ) -> SimResult<R> {
        let slot = id.0 as usize;
        let mut agent = self
            .agents
            .get_mut(slot)
            .and_then(Option::take)
            .ok_or(SimError::UnknownAgent(id))?;
        let out = {
            let mut ctx = Ctx { id, world: &mut self.world };
            f(agent.as_mut(), &mut ctx)
        };
        self.agents[slot] = Some(agent);
        out.map_err(|e| self.context(id, e))
    }

    fn live_ids(&self, include_retiring: bool) -> Vec<AgentId> {
        self.world
            .agents
            .values()
            .filter(|a| a.alive() && (include_retiring || !a.retiring))
            .map(|a| a.id)
            .collect()
    }

    /// Start decommissioning `id`. Agents holding nothing exit at once;
    /// others keep trading away their inventory and exit once empty.
    pub fn decommission(&mut self, id: AgentId) -> SimResult<()> {
        let info = self.world.info(id).ok_or(SimError::UnknownAgent(id))?;
        if !info.alive() {
            return Err(SimError::AgentDead(id));
        }
        if info.retiring {
            return Err(SimError::AlreadyRetiring(id));
        }
        if !self.world.rif.children(id).is_empty() {
            return Err(SimError::HasChildren(id));
        }
        self.call(id, |a, ctx| a.prepare_exit(ctx))?;
        if self.world.res.holds_anything(id) {
            self.world.agents.get_mut(&id).unwrap().retiring = true;
            Ok(())
        } else {
            self.exit(id)
        }
    }

    fn exit(&mut self, id: AgentId) -> SimResult<()> {
        if self.world.res.holds_anything(id) {
            return Err(SimError::Archetype(format!("agent {id} cannot exit while holding material")));
        }
        self.world.rif.remove(id)?;
        self.world.producers.unregister(id);
        self.world.sinks.remove(&id);
        let now = self.world.now();
        let info = self.world.agents.get_mut(&id).unwrap();
        info.exited = Some(now);
        info.retiring = false;
        self.agents[id.0 as usize] = None;
        self.world
            .record(TableKind::AgentExit, vec![id.to_string(), now.to_string()]);
        log::debug!("month {now}: agent {id} exited");
        Ok(())
    }

    /// Execute one full step and advance the clock.
    pub fn step(&mut self) -> SimResult<()> {
        if self.world.clock.finished() {
            return Ok(());
        }
        if self.world.phase == Phase::Init {
            self.record_resources();
        }
        for phase in Phase::SCHEDULE {
            self.world.phase = phase;
            match phase {
                Phase::Build => self.build_phase()?,
                Phase::Tick => {
                    for id in self.live_ids(false) {
                        self.call(id, |a, ctx| a.tick(ctx))?;
                    }
                }
                Phase::Exchange => self.exchange_phase()?,
                Phase::Tock => {
                    for id in self.live_ids(false) {
                        self.call(id, |a, ctx| a.tock(ctx))?;
                    }
                }
                Phase::Decommission => {
                    for id in self.live_ids(true) {
                        let info = &self.world.agents[&id];
                        if info.retiring && !self.world.res.holds_anything(id) {
                            self.exit(id)?;
                        }
                    }
                }
                Phase::Init | Phase::Done => unreachable!(),
            }
        }
        self.end_of_step()?;
        self.world.clock.advance();
        self.world.phase = if self.world.clock.finished() { Phase::Done } else { Phase::Build };
        Ok(())
    }

    fn build_phase(&mut self) -> SimResult<()> {
        let now = self.world.now();
        let due: Vec<AgentId> = self
            .world
            .agents
            .values()
            .filter(|a| a.alive() && !a.retiring && a.exit_at == Some(now))
            .map(|a| a.id)
            .collect();
        for id in due {
            self.decommission(id).map_err(|e| self.context(id, e))?;
        }
        let mut i = 0;
        loop {
            let ids = self.live_ids(false);
            let Some(&id) = ids.get(i) else { break };
            i += 1;
            self.call(id, |a, ctx| a.build(ctx))?;
            self.drain_deploys()?;
        }
        Ok(())
    }

    fn exchange_phase(&mut self) -> SimResult<()> {
        let mut market = Market::new();
        for id in self.live_ids(false) {
            let portfolios = self.call(id, |a, ctx| a.requests(ctx))?;
            for p in portfolios {
                market.post_requests(id, p).map_err(|e| self.context(id, e.into()))?;
            }
        }
        for id in self.live_ids(true) {
            let portfolios = self.call(id, |a, ctx| a.bids(ctx, &market))?;
            for p in portfolios {
                if p.is_empty() {
                    continue;
                }
                market.post_bids(id, p).map_err(|e| self.context(id, e.into()))?;
            }
        }
        let mut arcs = market.candidate_arcs();
        for arc in &mut arcs {
            let inst = self.world.rif.institution_of(arc.requester).filter(|i| *i != arc.requester);
            let region = self.world.rif.region_of(arc.requester).filter(|r| *r != arc.requester);
            for manager in [inst, region].into_iter().flatten() {
                if let Some(agent) = self.agent(manager) {
                    arc.preference = agent.adjust_pref(manager, &self.world, arc);
                }
            }
        }
        let graph = market.graph(&arcs);
        if graph.arcs.is_empty() {
            return Ok(());
        }
        let flows = match self.config.solver {
            SolverKind::Greedy => solve_greedy(&graph),
            SolverKind::Lp if !graph.has_exclusive() => solve_lp(&graph)?.flows,
            SolverKind::Lp if graph.arcs.len() <= EXACT_MAX_ARCS => solve_exact_small(&graph)?.flows,
            SolverKind::Lp => return Err(ExchangeError::ExclusiveInLp.into()),
        };
        let now = self.world.now();
        if self.config.dump_exchange {
            for (i, (a, x)) in graph.arcs.iter().zip(&flows).enumerate() {
                self.world.record(
                    TableKind::ExchangeArcs,
                    vec![
                        now.to_string(),
                        i.to_string(),
                        a.request.to_string(),
                        a.bid.to_string(),
                        a.supplier.to_string(),
                        a.requester.to_string(),
                        a.commodity.clone(),
                        a.preference.to_string(),
                        a.cost.to_string(),
                        a.upper.to_string(),
                        a.exclusive.map(|q| q.to_string()).unwrap_or_default(),
                        x.to_string(),
                    ],
                );
            }
        }
        for (a, &x) in graph.arcs.iter().zip(&flows) {
            if x <= FLOW_TOL {
                continue;
            }
            let order = TradeOrder {
                supplier: a.supplier,
                requester: a.requester,
                request: a.request,
                bid: a.bid,
                commodity: a.commodity.clone(),
                quantity: x,
            };
            let rid = self.call(a.supplier, |ag, ctx| ag.provide(ctx, &order))?;
            let r = self.world.res.get(rid)?;
            if r.owner != a.supplier || !r.alive || (r.quantity - x).abs() > PROVIDE_TOL {
                return Err(self.context(
                    a.supplier,
                    ExchangeError::WrongQuantity {
                        agent: a.supplier,
                        expected: x,
                        provided: if r.owner == a.supplier { r.quantity } else { 0.0 },
                    }
                    .into(),
                ));
            }
            let quantity = r.quantity;
            self.world.res.transfer(rid, a.requester)?;
            let tid = self.next_transaction;
            self.next_transaction += 1;
            self.world.record(
                TableKind::Transactions,
                vec![
                    tid.to_string(),
                    now.to_string(),
                    a.supplier.to_string(),
                    a.requester.to_string(),
                    a.commodity.clone(),
                    rid.to_string(),
                    quantity.to_string(),
                ],
            );
            self.summary.trades += 1;
            *self.summary.traded_mass.entry(a.commodity.clone()).or_default() += quantity;
            let trade = Trade {
                supplier: a.supplier,
                requester: a.requester,
                commodity: a.commodity.clone(),
                quantity,
                resource: rid,
                step: now,
            };
            self.call(a.requester, |ag, ctx| ag.accept(ctx, &trade))?;
        }
        Ok(())
    }

    fn record_resources(&mut self) {
        for comp in self.world.res.comps_mut().drain_fresh() {
            let rows: Vec<Vec<String>> = self
                .world
                .res
                .comps()
                .get(comp)
                .fractions()
                .iter()
                .map(|(n, f)| {
                    vec![comp.0.to_string(), n.zzaaam().to_string(), n.alias(), f.to_string()]
                })
                .collect();
            for r in rows {
                self.world.record(TableKind::Compositions, r);
            }
        }
        for ev in self.world.res.drain_events() {
            let parents: Vec<String> = ev.parents.iter().map(|p| p.to_string()).collect();
            self.world.record(
                TableKind::Resources,
                vec![
                    ev.id.to_string(),
                    ev.op.as_str().to_string(),
                    ev.time.to_string(),
                    ev.quantity.to_string(),
                    ev.comp.map(|c| c.0.to_string()).unwrap_or_default(),
                    ev.quality.unwrap_or_default(),
                    parents.join(" "),
                    ev.creator.to_string(),
                ],
            );
        }
    }

    fn end_of_step(&mut self) -> SimResult<()> {
        let now = self.world.now();
        self.record_resources();
        let mut rows = Vec::new();
        for id in self.live_ids(true) {
            let mut by_nuc: BTreeMap<NuclideId, f64> = BTreeMap::new();
            for rid in self.world.res.owned_by(id) {
                let r = self.world.res.get(rid)?;
                if let ResourceKind::Material { comp, .. } = r.kind {
                    for &(n, f) in self.world.res.comps().get(comp).fractions() {
                        *by_nuc.entry(n).or_default() += f * r.quantity;
                    }
                }
            }
            for (n, kg) in by_nuc {
                if kg > 0.0 {
                    rows.push(vec![
                        now.to_string(),
                        id.to_string(),
                        n.zzaaam().to_string(),
                        n.alias(),
                        kg.to_string(),
                    ]);
                }
            }
        }
        for r in rows {
            self.world.record(TableKind::TimeSeries, r);
        }
        self.summary.pu_series.push(self.world.res.element_mass(94));
        let sinks = &self.world.sinks;
        self.summary.balances.push(StepBalance {
            time: now,
            created: self.world.res.created_mass(),
            live: self.world.res.alive_mass_where(|a| !sinks.contains(&a)),
            sunk: self.world.res.alive_mass_where(|a| sinks.contains(&a)),
        });
        if (now + 1) % FLUSH_INTERVAL == 0 {
            self.world.recorder.flush()?;
        }
        Ok(())
    }

    /// Step until the clock reaches the configured duration.
    pub fn run(&mut self) -> SimResult<&RunSummary> {
        while !self.world.clock.finished() {
            self.step()?;
        }
        self.world.phase = Phase::Done;
        self.world.recorder.flush()?;
        Ok(&self.summary)
    }

    pub fn into_outputs(self) -> (OutputTables, RunSummary) {
        (self.world.recorder.into_tables(), self.summary)
    }

    /// Kinds of every live agent, for tests and audits.
    pub fn live_agents(&self) -> Vec<(AgentId, AgentKind, String)> {
        self.world
            .agents
            .values()
            .filter(|a| a.alive())
            .map(|a| (a.id, a.kind, a.prototype.clone()))
            .collect()
    }
}
