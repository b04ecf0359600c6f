use std::any::Any;
use std::sync::Arc;

use fck_core::archetypes::standard_registry;
use fck_core::config::{ConfigNode, Field, FieldType};
use fck_core::kernel::{Agent, ArchetypeSpec, Ctx, World};
use fck_core::output::TableKind;
use fck_core::{AgentId, AgentKind, Engine, EngineConfig, NuclideTable, SimError, SimResult};

/// Writes a diagnostic row for every callback it receives, so the order of
/// calls can be read back from the Diagnostics table.
struct Probe {
    action: String,
}

const PROBE: &[Field] = &[
    Field::opt("action", FieldType::Text),
    Field::opt("child", FieldType::Prototype),
];

fn probe(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
    Ok(Box::new(Probe { action: cfg.opt_str("action").unwrap_or_default() }))
}

impl Agent for Probe {
    fn enter(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        ctx.diagnostic("trace", "enter");
        Ok(())
    }
    fn build(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        ctx.diagnostic("trace", "build");
        Ok(())
    }
    fn tick(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        ctx.diagnostic("trace", "tick");
        if self.action == "deploy_in_tick" {
            ctx.deploy("probe")?;
        }
        Ok(())
    }
    fn tock(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        ctx.diagnostic("trace", "tock");
        Ok(())
    }
    fn prepare_exit(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        ctx.diagnostic("trace", "prepare_exit");
        Ok(())
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Institution that deploys one `child` in the build phase of month 1.
struct Spawner {
    child: String,
}

fn spawner(cfg: &ConfigNode, _: &World) -> SimResult<Box<dyn Agent>> {
    Ok(Box::new(Spawner { child: cfg.opt_str("child").unwrap_or_default() }))
}

impl Agent for Spawner {
    fn build(&mut self, ctx: &mut Ctx) -> SimResult<()> {
        if ctx.now() == 1 {
            ctx.deploy_with_lifetime(&self.child, Some(2))?;
        }
        Ok(())
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

fn engine(duration: u64) -> Engine {
    let mut reg = standard_registry();
    reg.register(ArchetypeSpec {
        name: "Probe".into(),
        kind: AgentKind::Facility,
        schema: PROBE,
        factory: probe,
    })
    .unwrap();
    reg.register(ArchetypeSpec {
        name: "Spawner".into(),
        kind: AgentKind::Institution,
        schema: PROBE,
        factory: spawner,
    })
    .unwrap();
    let config = EngineConfig { duration, ..EngineConfig::default() };
    let mut e = Engine::new(config, reg, Arc::new(NuclideTable::bundled()));
    e.register_prototype("region", "NullRegion", ConfigNode::new("NullRegion"), None).unwrap();
    e.register_prototype("inst", "NullInst", ConfigNode::new("NullInst"), None).unwrap();
    e.register_prototype("probe", "Probe", ConfigNode::new("Probe"), None).unwrap();
    e
}

fn trace(e: &Engine) -> Vec<(u64, u32, String)> {
    let t = e.tables().table(TableKind::Diagnostics);
    let (tc, ac, mc) = (
        t.column("time").unwrap(),
        t.column("agent_id").unwrap(),
        t.column("message").unwrap(),
    );
    t.rows
        .iter()
        .map(|r| (r[tc].parse().unwrap(), r[ac].parse().unwrap(), r[mc].clone()))
        .collect()
}

fn hierarchy(e: &mut Engine) -> (AgentId, AgentId) {
    let r = e.deploy("region", None, 0).unwrap();
    let i = e.deploy("inst", Some(r), 0).unwrap();
    (r, i)
}

#[test]
fn phases_run_in_schedule_order() {
    let mut e = engine(2);
    let (_, inst) = hierarchy(&mut e);
    let p = e.deploy("probe", Some(inst), 0).unwrap();
    e.run().unwrap();
    let got: Vec<(u64, String)> = trace(&e)
        .into_iter()
        .filter(|(_, a, _)| *a == p.0)
        .map(|(t, _, m)| (t, m))
        .collect();
    let want: Vec<(u64, String)> = [
        (0, "enter"),
        (0, "build"),
        (0, "tick"),
        (0, "tock"),
        (1, "build"),
        (1, "tick"),
        (1, "tock"),
    ]
    .into_iter()
    .map(|(t, m)| (t, m.to_string()))
    .collect();
    assert_eq!(got, want);
}

#[test]
fn ids_follow_entry_order() {
    let mut e = engine(1);
    let (r, i) = hierarchy(&mut e);
    let a = e.deploy("probe", Some(i), 0).unwrap();
    let b = e.deploy("probe", Some(i), 0).unwrap();
    assert_eq!([r, i, a, b], [AgentId(0), AgentId(1), AgentId(2), AgentId(3)]);
    let kinds: Vec<AgentKind> = e.live_agents().into_iter().map(|(_, k, _)| k).collect();
    assert_eq!(
        kinds,
        [AgentKind::Region, AgentKind::Institution, AgentKind::Facility, AgentKind::Facility]
    );
}

#[test]
fn hierarchy_rules_are_enforced() {
    let mut e = engine(1);
    assert!(matches!(e.deploy("probe", None, 0), Err(SimError::Rif(_))));
    assert!(matches!(e.deploy("inst", None, 0), Err(SimError::Rif(_))));
    let (r, i) = hierarchy(&mut e);
    assert!(matches!(e.deploy("probe", Some(r), 0), Err(SimError::Rif(_))));
    assert!(matches!(e.deploy("region", Some(i), 0), Err(SimError::Rif(_))));
    let f = e.deploy("probe", Some(i), 0).unwrap();
    assert!(matches!(e.deploy("probe", Some(f), 0), Err(SimError::Rif(_))));
    assert!(matches!(e.deploy("nothing", Some(i), 0), Err(SimError::UnknownPrototype(_))));
    assert!(e.world().rif.audit().is_empty());
}

#[test]
fn deploys_only_at_the_current_build_phase() {
    let mut e = engine(3);
    let (_, i) = hierarchy(&mut e);
    assert!(matches!(e.deploy("probe", Some(i), 2), Err(SimError::DeployTime { at: 2, now: 0 })));
    e.step().unwrap();
    // Between steps the engine waits at the start of the next build phase.
    assert!(matches!(e.deploy("probe", Some(i), 0), Err(SimError::DeployTime { at: 0, now: 1 })));
    assert!(e.deploy("probe", Some(i), 1).is_ok());
    e.run().unwrap();
    assert!(matches!(e.deploy("probe", Some(i), 3), Err(SimError::DeployTime { .. })));
}

#[test]
fn agent_deploy_outside_build_is_an_error_with_context() {
    let mut e = engine(2);
    let (_, i) = hierarchy(&mut e);
    let mut cfg = ConfigNode::new("Probe");
    cfg = cfg.with_leaf("action", "deploy_in_tick");
    e.register_prototype("eager", "Probe", cfg, None).unwrap();
    let id = e.deploy("eager", Some(i), 0).unwrap();
    let err = e.run().unwrap_err();
    match err {
        SimError::Context { step, agent, prototype, source } => {
            assert_eq!((step, agent, prototype.as_str()), (0, id, "eager"));
            assert!(matches!(*source, SimError::DeployTime { .. }));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn lifetimes_retire_agents_and_parents_cannot_leave_first() {
    let mut e = engine(6);
    let r = e.deploy("region", None, 0).unwrap();
    let cfg = ConfigNode::new("Spawner").with_leaf("child", "probe");
    e.register_prototype("spawner", "Spawner", cfg, None).unwrap();
    let s = e.deploy("spawner", Some(r), 0).unwrap();
    e.step().unwrap();
    e.step().unwrap();
    let child = AgentId(2);
    assert_eq!(e.world().info(child).unwrap().exit_at, Some(3));
    assert!(matches!(e.decommission(s), Err(SimError::HasChildren(_))));
    e.run().unwrap();
    let info = e.world().info(child).unwrap();
    assert_eq!(info.exited, Some(3));
    let exits = e.tables().table(TableKind::AgentExit);
    assert_eq!(exits.rows, vec![vec!["2".to_string(), "3".to_string()]]);
    let log = trace(&e);
    assert!(log.contains(&(3, 2, "prepare_exit".into())));
    assert!(!log.iter().any(|(t, a, _)| *a == 2 && *t > 3));
    // With the child gone the institution may leave.
    e.decommission(s).unwrap();
    assert_eq!(e.world().info(s).unwrap().exited, Some(6));
}

#[test]
fn bad_prototype_config_reports_a_path() {
    let mut e = engine(1);
    let cfg = ConfigNode::new("Source").with_leaf("commodity", "u").with_leaf("recipe", "missing");
    match e.register_prototype("src", "Source", cfg, None) {
        Err(SimError::Config(errs)) => {
            assert!(errs.iter().any(|c| c.path.starts_with("prototype[src]/Source")), "{errs:?}");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        e.register_prototype("x", "NoSuchThing", ConfigNode::new("x"), None),
        Err(SimError::UnknownArchetype(_))
    ));
    assert!(matches!(
        e.register_prototype("probe", "Probe", ConfigNode::new("Probe"), None),
        Err(SimError::DuplicatePrototype(_))
    ));
}

#[test]
fn info_table_records_the_run_settings() {
    let e = engine(7);
    let info = e.tables().table(TableKind::Info);
    assert!(info.rows.contains(&vec!["duration".to_string(), "7".to_string()]));
    assert!(info.rows.contains(&vec!["solver".to_string(), "greedy".to_string()]));
}
