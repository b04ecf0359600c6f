use std::path::PathBuf;
use std::sync::Arc;

use super::doc::{Basis, ScenarioDoc};
use super::ScenarioError;
use crate::config::ConfigError;
use crate::kernel::{ArchetypeRegistry, Engine, EngineConfig, SimError};
use crate::output::OutputTables;
use crate::kernel::RunSummary;
use crate::resources::NuclideTable;

impl ScenarioDoc {
    pub fn engine_config(&self, output_dir: Option<PathBuf>) -> EngineConfig {
        EngineConfig {
            duration: self.control.duration,
            seed: self.control.seed,
            decay: self.control.decay,
            solver: self.control.solver,
            dump_exchange: self.control.dump_exchange,
            output_dir,
        }
    }

    /// Validate, register recipes and prototypes, and deploy the initial
    /// hierarchy at month 0.
    pub fn build_engine(
        &self,
        registry: ArchetypeRegistry,
        table: Arc<NuclideTable>,
        output_dir: Option<PathBuf>,
    ) -> Result<Engine, ScenarioError> {
        let errs = self.validate(&registry);
        if !errs.is_empty() {
            return Err(ScenarioError::Invalid(errs));
        }
        let mut engine = Engine::new(self.engine_config(output_dir), registry, table.clone());
        let setup = |e: SimError| ScenarioError::Setup(Box::new(e));
        for rec in &self.recipes {
            let path = format!("simulation/recipe[{}]", rec.name);
            let mut fr = rec
                .parsed()
                .map_err(|m| ScenarioError::Invalid(vec![ConfigError::new(&path, m)]))?;
            if rec.basis == Basis::Atom {
                for (n, f) in &mut fr {
                    *f *= table.atomic_mass(*n);
                }
                let total: f64 = fr.iter().map(|e| e.1).sum();
                for (_, f) in &mut fr {
                    *f /= total;
                }
            }
            engine.add_recipe(&rec.name, fr).map_err(|e| {
                ScenarioError::Invalid(vec![ConfigError::new(&path, e.to_string())])
            })?;
        }
        // Facilities first so institutions may refer to them.
        let mut protos = self.prototypes();
        protos.sort_by_key(|(_, kind, _)| match kind {
            crate::kernel::AgentKind::Facility => 0,
            crate::kernel::AgentKind::Institution => 1,
            crate::kernel::AgentKind::Region => 2,
        });
        for (path, _, p) in protos {
            engine
                .register_prototype(&p.name, &p.archetype, p.config.clone(), p.lifetime)
                .map_err(|e| match e {
                    SimError::Config(es) => ScenarioError::Invalid(
                        es.into_iter()
                            .map(|c| {
                                let rest = c.path.split_once('/').map(|(_, r)| r.to_string());
                                ConfigError::new(
                                    format!("{path}/config/{}", rest.unwrap_or_default()),
                                    c.message,
                                )
                            })
                            .collect(),
                    ),
                    other => ScenarioError::Invalid(vec![ConfigError::new(&path, other.to_string())]),
                })?;
        }
        for reg in &self.regions {
            let rid = engine.deploy(&reg.proto.name, None, 0).map_err(setup)?;
            for inst in &reg.institutions {
                let iid = engine.deploy(&inst.proto.name, Some(rid), 0).map_err(setup)?;
                for e in &inst.initial {
                    for _ in 0..e.number {
                        engine.deploy(&e.prototype, Some(iid), 0).map_err(setup)?;
                    }
                }
            }
        }
        Ok(engine)
    }

    /// Build and run to completion with the bundled decay data.
    pub fn run(
        &self,
        registry: ArchetypeRegistry,
        output_dir: Option<PathBuf>,
    ) -> Result<(OutputTables, RunSummary), ScenarioError> {
        let table = Arc::new(NuclideTable::from_env().map_err(|e| ScenarioError::Setup(Box::new(e.into())))?);
        let mut engine = self.build_engine(registry, table, output_dir)?;
        engine.run().map_err(|e| ScenarioError::Runtime(Box::new(e)))?;
        Ok(engine.into_outputs())
    }
}
