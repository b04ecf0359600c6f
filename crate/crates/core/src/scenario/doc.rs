use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::config::{self, parse_bool, parse_f64, parse_u64, ConfigError, ConfigNode, NameLookup};
use crate::exchange::SolverKind;
use crate::kernel::{AgentKind, ArchetypeRegistry};
use crate::resources::{DecayMode, NuclideId};

/// Run-wide settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Control {
    pub duration: u64,
    pub seed: u64,
    pub decay: DecayMode,
    pub solver: SolverKind,
    pub dump_exchange: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Mass,
    Atom,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Mass => "mass",
            Basis::Atom => "atom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecipeDef {
    pub name: String,
    pub basis: Basis,
    /// Nuclide as written in the file, and its fraction.
    pub nuclides: Vec<(String, f64)>,
}

impl RecipeDef {
    /// Fractions keyed by parsed nuclide; errors name the offending entry.
    pub fn parsed(&self) -> Result<Vec<(NuclideId, f64)>, String> {
        self.nuclides
            .iter()
            .map(|(n, f)| n.parse::<NuclideId>().map(|id| (id, *f)).map_err(|e| e.to_string()))
            .collect()
    }
}

/// A named archetype configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtoDef {
    pub name: String,
    pub lifetime: Option<u64>,
    pub archetype: String,
    /// The archetype element's children.
    pub config: ConfigNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialFacility {
    pub prototype: String,
    pub number: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionDef {
    pub proto: ProtoDef,
    pub initial: Vec<InitialFacility>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDef {
    pub proto: ProtoDef,
    pub institutions: Vec<InstitutionDef>,
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    pub control: Control,
    pub recipes: Vec<RecipeDef>,
    pub facilities: Vec<ProtoDef>,
    pub regions: Vec<RegionDef>,
}

/// Errors collected while reading a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseErrors(pub Vec<ConfigError>);

impl std::fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

use crate::resources::AUTO_NORMALIZE_TOL;

const ROOT: &str = "simulation";

fn xml_to_node(el: roxmltree::Node) -> ConfigNode {
    let mut node = ConfigNode::new(el.tag_name().name());
    let mut text = String::new();
    for c in el.children() {
        if c.is_element() {
            node.children.push(xml_to_node(c));
        } else if c.is_text() {
            text.push_str(c.text().unwrap_or(""));
        }
    }
    if node.children.is_empty() {
        node.text = Some(text.trim().to_string());
    }
    node
}

/// Collects errors while walking the tree so one pass reports them all.
struct Reader {
    errs: Vec<ConfigError>,
}

impl Reader {
    fn err(&mut self, path: &str, msg: impl Into<String>) {
        self.errs.push(ConfigError::new(path, msg));
    }

    fn only_fields(&mut self, node: &ConfigNode, path: &str, allowed: &[&str]) {
        for c in &node.children {
            if !allowed.contains(&c.name.as_str()) {
                self.err(&format!("{path}/{}", c.name), "unknown field");
            }
        }
    }

    fn text<'a>(&mut self, node: &'a ConfigNode, name: &'a str, path: &str) -> Option<&'a str> {
        let mut found = node.children_named(name);
        match (found.next(), found.next()) {
            (Some(c), None) if c.children.is_empty() => Some(c.text()),
            (Some(_), None) => {
                self.err(&format!("{path}/{name}"), "expected a value, found nested elements");
                None
            }
            (Some(_), Some(_)) => {
                self.err(&format!("{path}/{name}"), "expected one value");
                None
            }
            (None, _) => {
                self.err(&format!("{path}/{name}"), "required field missing");
                None
            }
        }
    }

    fn opt_text<'a>(&mut self, node: &'a ConfigNode, name: &'a str, path: &str) -> Option<&'a str> {
        if node.child(name).is_some() {
            self.text(node, name, path)
        } else {
            None
        }
    }

    fn parse<T>(
        &mut self,
        v: Option<&str>,
        path: String,
        f: impl Fn(&str) -> Result<T, String>,
    ) -> Option<T> {
        match f(v?) {
            Ok(x) => Some(x),
            Err(m) => {
                self.err(&path, m);
                None
            }
        }
    }

    fn control(&mut self, node: Option<&ConfigNode>) -> Control {
        let path = format!("{ROOT}/control");
        let mut c = Control {
            duration: 0,
            seed: 0,
            decay: DecayMode::Manual,
            solver: SolverKind::Greedy,
            dump_exchange: false,
        };
        let Some(node) = node else {
            self.err(&path, "required field missing");
            return c;
        };
        self.only_fields(node, &path, &["duration", "seed", "decay", "solver", "dump_exchange"]);
        let v = self.text(node, "duration", &path);
        if let Some(d) = self.parse(v, format!("{path}/duration"), parse_u64) {
            if d == 0 {
                self.err(&format!("{path}/duration"), "must be at least 1 month");
            }
            c.duration = d;
        }
        let v = self.opt_text(node, "seed", &path);
        if let Some(s) = self.parse(v, format!("{path}/seed"), parse_u64) {
            c.seed = s;
        }
        let v = self.opt_text(node, "decay", &path);
        if let Some(d) = self.parse(v, format!("{path}/decay"), |s| s.parse::<DecayMode>().map_err(|e| e.to_string())) {
            c.decay = d;
        }
        let v = self.opt_text(node, "solver", &path);
        if let Some(s) = self.parse(v, format!("{path}/solver"), |s| s.parse::<SolverKind>().map_err(|e| e.to_string())) {
            c.solver = s;
        }
        let v = self.opt_text(node, "dump_exchange", &path);
        if let Some(b) = self.parse(v, format!("{path}/dump_exchange"), parse_bool) {
            c.dump_exchange = b;
        }
        c
    }

    fn recipe(&mut self, node: &ConfigNode, index: usize) -> RecipeDef {
        let name = node.child("name").map(|n| n.text().to_string()).unwrap_or_default();
        let path = if name.is_empty() {
            format!("{ROOT}/recipe[{index}]")
        } else {
            format!("{ROOT}/recipe[{name}]")
        };
        self.only_fields(node, &path, &["name", "basis", "nuclide"]);
        self.text(node, "name", &path);
        let v = self.text(node, "basis", &path);
        let basis = self
            .parse(v, format!("{path}/basis"), |s| match s {
                "mass" => Ok(Basis::Mass),
                "atom" => Ok(Basis::Atom),
                other => Err(format!("unknown basis '{other}'; expected mass or atom")),
            })
            .unwrap_or(Basis::Mass);
        let mut nuclides = Vec::new();
        for (i, n) in node.children_named("nuclide").enumerate() {
            let p = format!("{path}/nuclide[{i}]");
            self.only_fields(n, &p, &["id", "comp"]);
            let id = self.text(n, "id", &p).map(str::to_string);
            let v = self.text(n, "comp", &p);
            let comp = self.parse(v, format!("{p}/comp"), |s| {
                let x = parse_f64(s)?;
                if x.is_finite() && x >= 0.0 {
                    Ok(x)
                } else {
                    Err(format!("{x} out of range; expected a non-negative number"))
                }
            });
            if let Some(id) = &id {
                if let Err(e) = id.parse::<NuclideId>() {
                    self.err(&format!("{p}/id"), e.to_string());
                }
            }
            if let (Some(id), Some(comp)) = (id, comp) {
                nuclides.push((id, comp));
            }
        }
        if nuclides.is_empty() {
            self.err(&format!("{path}/nuclide"), "a recipe needs at least one nuclide");
        } else {
            let total: f64 = nuclides.iter().map(|e| e.1).sum();
            if (total - 1.0).abs() > AUTO_NORMALIZE_TOL {
                self.err(&path, format!("fractions sum to {total}, expected 1"));
            }
        }
        RecipeDef { name, basis, nuclides }
    }

    fn proto(&mut self, node: &ConfigNode, path: &str, extra: &[&str]) -> ProtoDef {
        let mut allowed = vec!["name", "lifetime", "config"];
        allowed.extend_from_slice(extra);
        self.only_fields(node, path, &allowed);
        let name = self.text(node, "name", path).unwrap_or_default().to_string();
        let v = self.opt_text(node, "lifetime", path);
        let lifetime = self.parse(v, format!("{path}/lifetime"), parse_u64);
        let (archetype, config) = match node.child("config").map(|c| c.children.as_slice()) {
            Some([arch]) => (arch.name.clone(), arch.clone()),
            Some(_) => {
                self.err(&format!("{path}/config"), "expected exactly one archetype element");
                (String::new(), ConfigNode::new(""))
            }
            None => {
                self.err(&format!("{path}/config"), "required field missing");
                (String::new(), ConfigNode::new(""))
            }
        };
        ProtoDef { name, lifetime, archetype, config }
    }

    fn institution(&mut self, node: &ConfigNode, path: &str) -> InstitutionDef {
        let proto = self.proto(node, path, &["initialfacilitylist"]);
        let mut initial = Vec::new();
        let lists: Vec<&ConfigNode> = node.children_named("initialfacilitylist").collect();
        if lists.len() > 1 {
            self.err(&format!("{path}/initialfacilitylist"), "expected one value");
        }
        for list in lists {
            let lp = format!("{path}/initialfacilitylist");
            self.only_fields(list, &lp, &["entry"]);
            for (i, e) in list.children_named("entry").enumerate() {
                let ep = format!("{lp}/entry[{i}]");
                self.only_fields(e, &ep, &["prototype", "number"]);
                let prototype = self.text(e, "prototype", &ep).unwrap_or_default().to_string();
                let v = self.opt_text(e, "number", &ep);
                let number = self.parse(v, format!("{ep}/number"), parse_u64).unwrap_or(1);
                initial.push(InitialFacility { prototype, number });
            }
        }
        InstitutionDef { proto, initial }
    }
}

fn name_path(kind: &str, name: &str, index: usize) -> String {
    if name.is_empty() {
        format!("{kind}[{index}]")
    } else {
        format!("{kind}[{name}]")
    }
}

impl ScenarioDoc {
    /// Parse scenario text; structural problems are reported with paths.
    pub fn parse(text: &str) -> Result<ScenarioDoc, ParseErrors> {
        let xml = roxmltree::Document::parse(text)
            .map_err(|e| ParseErrors(vec![ConfigError::new(ROOT, format!("malformed document: {e}"))]))?;
        let root = xml_to_node(xml.root_element());
        if root.name != ROOT {
            return Err(ParseErrors(vec![ConfigError::new(
                &root.name,
                format!("root element must be <{ROOT}>"),
            )]));
        }
        Self::from_node(&root)
    }

    /// Build from an already parsed tree rooted at `<simulation>`.
    pub fn from_node(root: &ConfigNode) -> Result<ScenarioDoc, ParseErrors> {
        let mut r = Reader { errs: Vec::new() };
        r.only_fields(root, ROOT, &["control", "recipe", "facility", "region"]);
        let control = r.control(root.child("control"));
        let recipes = root
            .children_named("recipe")
            .enumerate()
            .map(|(i, n)| r.recipe(n, i))
            .collect();
        let mut facilities = Vec::new();
        for (i, f) in root.children_named("facility").enumerate() {
            let name = f.child("name").map(|n| n.text()).unwrap_or("");
            let path = format!("{ROOT}/{}", name_path("facility", name, i));
            facilities.push(r.proto(f, &path, &[]));
        }
        let mut regions = Vec::new();
        for (i, reg) in root.children_named("region").enumerate() {
            let name = reg.child("name").map(|n| n.text()).unwrap_or("");
            let path = format!("{ROOT}/{}", name_path("region", name, i));
            let proto = r.proto(reg, &path, &["institution"]);
            let mut institutions = Vec::new();
            for (j, inst) in reg.children_named("institution").enumerate() {
                let iname = inst.child("name").map(|n| n.text()).unwrap_or("");
                let ipath = format!("{path}/{}", name_path("institution", iname, j));
                institutions.push(r.institution(inst, &ipath));
            }
            regions.push(RegionDef { proto, institutions });
        }
        if r.errs.is_empty() {
            Ok(ScenarioDoc { control, recipes, facilities, regions })
        } else {
            Err(ParseErrors(r.errs))
        }
    }

    /// Every prototype with its path in the document and the agent kind it
    /// must declare.
    pub fn prototypes(&self) -> Vec<(String, AgentKind, &ProtoDef)> {
        let mut out = Vec::new();
        for f in &self.facilities {
            out.push((format!("{ROOT}/facility[{}]", f.name), AgentKind::Facility, f));
        }
        for reg in &self.regions {
            let rp = format!("{ROOT}/region[{}]", reg.proto.name);
            for inst in &reg.institutions {
                out.push((
                    format!("{rp}/institution[{}]", inst.proto.name),
                    AgentKind::Institution,
                    &inst.proto,
                ));
            }
            out.push((rp, AgentKind::Region, &reg.proto));
        }
        out
    }

    /// Semantic checks against the archetype registry: names, references,
    /// archetype schemas and recipe contents.
    pub fn validate(&self, registry: &ArchetypeRegistry) -> Vec<ConfigError> {
        let mut errs = Vec::new();
        let mut recipes = BTreeSet::new();
        for rec in &self.recipes {
            let path = format!("{ROOT}/recipe[{}]", rec.name);
            if !recipes.insert(rec.name.clone()) {
                errs.push(ConfigError::new(&path, format!("duplicate recipe '{}'", rec.name)));
            }
            if rec.nuclides.iter().map(|(_, f)| f).sum::<f64>() <= 0.0 {
                errs.push(ConfigError::new(&path, "fractions sum to zero"));
            }
        }
        let protos = self.prototypes();
        let mut names = BTreeSet::new();
        let mut facilities = BTreeSet::new();
        for (path, kind, p) in &protos {
            if !names.insert(p.name.clone()) {
                errs.push(ConfigError::new(path, format!("duplicate prototype '{}'", p.name)));
            }
            if *kind == AgentKind::Facility {
                facilities.insert(p.name.clone());
            }
        }
        let lookup = DocNames { recipes: &recipes, prototypes: &names };
        for (path, kind, p) in &protos {
            let apath = format!("{path}/config/{}", p.archetype);
            match registry.get(&p.archetype) {
                Err(_) => errs.push(ConfigError::new(
                    &apath,
                    format!("unknown archetype '{}'", p.archetype),
                )),
                Ok(spec) if spec.kind != *kind => errs.push(ConfigError::new(
                    &apath,
                    format!(
                        "archetype '{}' is a {} but is configured as a {}",
                        p.archetype,
                        spec.kind.as_str(),
                        kind.as_str()
                    ),
                )),
                Ok(spec) => config::validate(&p.config, spec.schema, &apath, &lookup, &mut errs),
            }
        }
        for reg in &self.regions {
            for inst in &reg.institutions {
                for (i, e) in inst.initial.iter().enumerate() {
                    if !facilities.contains(&e.prototype) {
                        errs.push(ConfigError::new(
                            format!(
                                "{ROOT}/region[{}]/institution[{}]/initialfacilitylist/entry[{i}]/prototype",
                                reg.proto.name, inst.proto.name
                            ),
                            format!("undefined facility prototype '{}'", e.prototype),
                        ));
                    }
                }
            }
        }
        errs
    }

    /// The document as a generic tree rooted at `<simulation>`.
    pub fn to_node(&self) -> ConfigNode {
        let c = &self.control;
        let control = ConfigNode::new("control")
            .with_leaf("duration", c.duration)
            .with_leaf("seed", c.seed)
            .with_leaf("decay", c.decay.as_str())
            .with_leaf("solver", c.solver.as_str())
            .with_leaf("dump_exchange", c.dump_exchange);
        let mut root = ConfigNode::new(ROOT).with(control);
        for rec in &self.recipes {
            let mut n = ConfigNode::new("recipe")
                .with_leaf("name", &rec.name)
                .with_leaf("basis", rec.basis.as_str());
            for (id, f) in &rec.nuclides {
                n = n.with(ConfigNode::new("nuclide").with_leaf("id", id).with_leaf("comp", f));
            }
            root = root.with(n);
        }
        for f in &self.facilities {
            root = root.with(proto_node("facility", f));
        }
        for reg in &self.regions {
            let mut rn = proto_node("region", &reg.proto);
            for inst in &reg.institutions {
                let mut inode = proto_node("institution", &inst.proto);
                if !inst.initial.is_empty() {
                    let mut list = ConfigNode::new("initialfacilitylist");
                    for e in &inst.initial {
                        list = list.with(
                            ConfigNode::new("entry")
                                .with_leaf("prototype", &e.prototype)
                                .with_leaf("number", e.number),
                        );
                    }
                    inode = inode.with(list);
                }
                rn = rn.with(inode);
            }
            root = root.with(rn);
        }
        root
    }

    /// Serialize to the same grammar `parse` reads.
    pub fn to_xml(&self) -> String {
        let mut out = String::new();
        write_node(&self.to_node(), 0, &mut out);
        out
    }

    /// Leaf-level differences, one line per changed field.
    pub fn diff(&self, other: &ScenarioDoc) -> Vec<String> {
        let mut out = Vec::new();
        self.to_node().diff(&other.to_node(), "", &mut out);
        out
    }
}

struct DocNames<'a> {
    recipes: &'a BTreeSet<String>,
    prototypes: &'a BTreeSet<String>,
}

impl NameLookup for DocNames<'_> {
    fn has_recipe(&self, name: &str) -> bool {
        self.recipes.contains(name)
    }

    fn has_prototype(&self, name: &str) -> bool {
        self.prototypes.contains(name)
    }
}

fn proto_node(tag: &str, p: &ProtoDef) -> ConfigNode {
    let mut n = ConfigNode::new(tag).with_leaf("name", &p.name);
    if let Some(l) = p.lifetime {
        n = n.with_leaf("lifetime", l);
    }
    n.with(ConfigNode::new("config").with(p.config.clone()))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write_node(n: &ConfigNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    if n.children.is_empty() {
        match n.text.as_deref() {
            Some(t) if !t.is_empty() => {
                let _ = writeln!(out, "{pad}<{0}>{1}</{0}>", n.name, escape(t));
            }
            _ => {
                let _ = writeln!(out, "{pad}<{}/>", n.name);
            }
        }
        return;
    }
    let _ = writeln!(out, "{pad}<{}>", n.name);
    for c in &n.children {
        write_node(c, depth + 1, out);
    }
    let _ = writeln!(out, "{pad}</{}>", n.name);
}
