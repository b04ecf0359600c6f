//! Generic configuration tree and the declarative schemas archetypes use to
//! describe their inputs.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::resources::{element_number, NuclideId};

/// Element of a configuration document: a name plus either text or children.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigNode {
    pub name: String,
    pub text: Option<String>,
    pub children: Vec<ConfigNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }

    /// Prefix the path with an enclosing location.
    pub fn within(mut self, prefix: &str) -> Self {
        self.path = if self.path.is_empty() {
            prefix.to_string()
        } else {
            format!("{prefix}/{}", self.path)
        };
        self
    }
}

impl ConfigNode {
    pub fn new(name: impl Into<String>) -> Self {
        ConfigNode { name: name.into(), text: None, children: Vec::new() }
    }

    pub fn leaf(name: impl Into<String>, text: impl Into<String>) -> Self {
        ConfigNode { name: name.into(), text: Some(text.into()), children: Vec::new() }
    }

    pub fn with(mut self, child: ConfigNode) -> Self {
        self.children.push(child);
        self
    }

    pub fn with_leaf(self, name: &str, text: impl fmt::Display) -> Self {
        self.with(ConfigNode::leaf(name, text.to_string()))
    }

    pub fn child(&self, name: &str) -> Option<&ConfigNode> {
        self.children.iter().find(|c| c.name == name)
    }

    pub fn children_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ConfigNode> + 'a {
        self.children.iter().filter(move |c| c.name == name)
    }

    pub fn text(&self) -> &str {
        self.text.as_deref().unwrap_or("").trim()
    }

    fn required(&self, name: &str) -> Result<&ConfigNode, ConfigError> {
        self.child(name)
            .ok_or_else(|| ConfigError::new(name, "required field missing"))
    }

    pub fn req_str(&self, name: &str) -> Result<String, ConfigError> {
        Ok(self.required(name)?.text().to_string())
    }

    pub fn opt_str(&self, name: &str) -> Option<String> {
        self.child(name).map(|c| c.text().to_string())
    }

    pub fn req_f64(&self, name: &str) -> Result<f64, ConfigError> {
        parse_f64(self.required(name)?.text()).map_err(|m| ConfigError::new(name, m))
    }

    pub fn opt_f64(&self, name: &str, default: f64) -> Result<f64, ConfigError> {
        match self.child(name) {
            Some(c) => parse_f64(c.text()).map_err(|m| ConfigError::new(name, m)),
            None => Ok(default),
        }
    }

    pub fn req_u64(&self, name: &str) -> Result<u64, ConfigError> {
        parse_u64(self.required(name)?.text()).map_err(|m| ConfigError::new(name, m))
    }

    pub fn opt_u64(&self, name: &str) -> Result<Option<u64>, ConfigError> {
        self.child(name)
            .map(|c| parse_u64(c.text()).map_err(|m| ConfigError::new(name, m)))
            .transpose()
    }

    pub fn opt_bool(&self, name: &str, default: bool) -> Result<bool, ConfigError> {
        match self.child(name) {
            Some(c) => parse_bool(c.text()).map_err(|m| ConfigError::new(name, m)),
            None => Ok(default),
        }
    }

    /// Leaf-path differences between two trees, e.g. `r/fuel[1]/out: "x" != "y"`.
    ///
    /// `path` is the location of the parent; an empty string means `self` is
    /// the root. Children carrying a `name` leaf are labelled by that name,
    /// other repeated siblings by their position.
    pub fn diff(&self, other: &ConfigNode, path: &str, out: &mut Vec<String>) {
        let here = if path.is_empty() { self.name.clone() } else { format!("{path}/{}", self.name) };
        self.diff_at(other, &here, out);
    }

    fn diff_at(&self, other: &ConfigNode, here: &str, out: &mut Vec<String>) {
        if self.name != other.name {
            out.push(format!("{here}: element '{}' != '{}'", self.name, other.name));
            return;
        }
        if self.text() != other.text() {
            out.push(format!("{here}: {:?} != {:?}", self.text(), other.text()));
        }
        let names: BTreeSet<&str> = self
            .children
            .iter()
            .chain(other.children.iter())
            .map(|c| c.name.as_str())
            .collect();
        for name in names {
            let a: Vec<_> = self.children_named(name).collect();
            let b: Vec<_> = other.children_named(name).collect();
            let n = a.len().max(b.len());
            for i in 0..n {
                let key = |c: Option<&&ConfigNode>| {
                    c.and_then(|c| c.child("name")).map(|k| k.text().to_string())
                };
                let p = match (key(a.get(i)), key(b.get(i))) {
                    (Some(x), Some(y)) if x == y => format!("{here}/{name}[{x}]"),
                    _ if n > 1 => format!("{here}/{name}[{i}]"),
                    _ => format!("{here}/{name}"),
                };
                match (a.get(i), b.get(i)) {
                    (Some(x), Some(y)) => x.diff_at(y, &p, out),
                    (Some(_), None) => out.push(format!("{p}: removed")),
                    (None, Some(_)) => out.push(format!("{p}: added")),
                    (None, None) => unreachable!(),
                }
            }
        }
    }
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("expected a number, got '{s}'"))
        .and_then(|v| if v.is_nan() { Err("NaN is not allowed".to_string()) } else { Ok(v) })
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("expected true or false, got '{other}'")),
    }
}

/// Allowed range for numeric fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    Any,
    NonNegative,
    Positive,
    /// [0, 1]
    Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    Int,
    Float(Range),
    Text,
    Bool,
    /// Name of a recipe defined in the scenario.
    Recipe,
    /// Name of a prototype defined in the scenario.
    Prototype,
    Commodity,
    Nuclide,
    /// Chemical element symbol such as `Pu`.
    Element,
    Block(&'static [Field]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occurs {
    One,
    Optional,
    Many,
    OneOrMore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Field {
    pub name: &'static str,
    pub ty: FieldType,
    pub occurs: Occurs,
}

impl Field {
    pub const fn one(name: &'static str, ty: FieldType) -> Self {
        Field { name, ty, occurs: Occurs::One }
    }
    pub const fn opt(name: &'static str, ty: FieldType) -> Self {
        Field { name, ty, occurs: Occurs::Optional }
    }
    pub const fn many(name: &'static str, ty: FieldType) -> Self {
        Field { name, ty, occurs: Occurs::Many }
    }
    pub const fn one_or_more(name: &'static str, ty: FieldType) -> Self {
        Field { name, ty, occurs: Occurs::OneOrMore }
    }
}

/// Names defined elsewhere in a scenario that fields may refer to.
pub trait NameLookup {
    fn has_recipe(&self, name: &str) -> bool;
    fn has_prototype(&self, name: &str) -> bool;
}

/// No cross-references are checked.
pub struct NoLookup;

impl NameLookup for NoLookup {
    fn has_recipe(&self, _: &str) -> bool {
        true
    }
    fn has_prototype(&self, _: &str) -> bool {
        true
    }
}

/// Validate `node`'s children against `schema`, appending problems to `errs`.
pub fn validate(
    node: &ConfigNode,
    schema: &[Field],
    path: &str,
    names: &dyn NameLookup,
    errs: &mut Vec<ConfigError>,
) {
    for c in &node.children {
        if !schema.iter().any(|f| f.name == c.name) {
            errs.push(ConfigError::new(format!("{path}/{}", c.name), "unknown field"));
        }
    }
    for f in schema {
        let found: Vec<&ConfigNode> = node.children_named(f.name).collect();
        let fpath = format!("{path}/{}", f.name);
        let count_ok = match f.occurs {
            Occurs::One => found.len() == 1,
            Occurs::Optional => found.len() <= 1,
            Occurs::Many => true,
            Occurs::OneOrMore => !found.is_empty(),
        };
        if !count_ok {
            let msg = if found.is_empty() {
                "required field missing".to_string()
            } else {
                format!("expected one value, found {}", found.len())
            };
            errs.push(ConfigError::new(fpath.clone(), msg));
        }
        for (i, c) in found.iter().enumerate() {
            let p = if found.len() > 1 { format!("{fpath}[{i}]") } else { fpath.clone() };
            check_value(c, f.ty, &p, names, errs);
        }
    }
}

fn check_value(
    node: &ConfigNode,
    ty: FieldType,
    path: &str,
    names: &dyn NameLookup,
    errs: &mut Vec<ConfigError>,
) {
    if let FieldType::Block(inner) = ty {
        validate(node, inner, path, names, errs);
        return;
    }
    if !node.children.is_empty() {
        errs.push(ConfigError::new(path, "expected a value, found nested elements"));
        return;
    }
    let t = node.text();
    let res: Result<(), String> = match ty {
        FieldType::Int => parse_u64(t).map(|_| ()),
        FieldType::Float(range) => parse_f64(t).and_then(|v| check_range(v, range)),
        FieldType::Bool => parse_bool(t).map(|_| ()),
        FieldType::Text | FieldType::Commodity => {
            if t.is_empty() {
                Err("must not be empty".into())
            } else {
                Ok(())
            }
        }
        FieldType::Recipe => {
            if names.has_recipe(t) {
                Ok(())
            } else {
                Err(format!("undefined recipe '{t}'"))
            }
        }
        FieldType::Prototype => {
            if names.has_prototype(t) {
                Ok(())
            } else {
                Err(format!("undefined prototype '{t}'"))
            }
        }
        FieldType::Nuclide => t.parse::<NuclideId>().map(|_| ()).map_err(|e| e.to_string()),
        FieldType::Element => element_z(t).map(|_| ()),
        FieldType::Block(_) => unreachable!(),
    };
    if let Err(m) = res {
        errs.push(ConfigError::new(path, m));
    }
}

fn check_range(v: f64, range: Range) -> Result<(), String> {
    let ok = match range {
        Range::Any => true,
        Range::NonNegative => v >= 0.0,
        Range::Positive => v > 0.0,
        Range::Fraction => (0.0..=1.0).contains(&v),
    };
    if ok {
        Ok(())
    } else {
        let want = match range {
            Range::Any => "any number",
            Range::NonNegative => "a non-negative number",
            Range::Positive => "a positive number",
            Range::Fraction => "a fraction in [0, 1]",
        };
        Err(format!("{v} out of range; expected {want}"))
    }
}

/// Atomic number of an element symbol (case-insensitive) or a bare number.
pub fn element_z(s: &str) -> Result<u32, String> {
    let s = s.trim();
    if let Ok(z) = s.parse::<u32>() {
        if (1..=120).contains(&z) {
            return Ok(z);
        }
    }
    element_number(s).ok_or_else(|| format!("unknown element '{s}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const INNER: &[Field] = &[Field::one("x", FieldType::Float(Range::Positive))];
    const SCHEMA: &[Field] = &[
        Field::one("n", FieldType::Int),
        Field::opt("name", FieldType::Text),
        Field::many("block", FieldType::Block(INNER)),
        Field::opt("recipe", FieldType::Recipe),
    ];

    struct Names;
    impl NameLookup for Names {
        fn has_recipe(&self, n: &str) -> bool {
            n == "fresh"
        }
        fn has_prototype(&self, _: &str) -> bool {
            false
        }
    }

    fn errors(node: &ConfigNode) -> Vec<ConfigError> {
        let mut errs = Vec::new();
        validate(node, SCHEMA, "cfg", &Names, &mut errs);
        errs
    }

    #[test]
    fn accepts_valid_tree() {
        let node = ConfigNode::new("cfg")
            .with_leaf("n", 3)
            .with(ConfigNode::new("block").with_leaf("x", 1.5))
            .with(ConfigNode::new("block").with_leaf("x", "inf"))
            .with_leaf("recipe", "fresh");
        assert_eq!(errors(&node), vec![]);
    }

    #[test]
    fn reports_paths() {
        let node = ConfigNode::new("cfg")
            .with_leaf("n", "-1")
            .with(ConfigNode::new("block").with_leaf("x", 0))
            .with(ConfigNode::new("block").with_leaf("x", 1))
            .with_leaf("recipe", "stale")
            .with_leaf("color", "red");
        let errs = errors(&node);
        let paths: Vec<&str> = errs.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(paths, vec!["cfg/color", "cfg/n", "cfg/block[0]/x", "cfg/recipe"]);
        assert!(errs[3].message.contains("stale"));

        let missing = errors(&ConfigNode::new("cfg"));
        assert_eq!(missing, vec![ConfigError::new("cfg/n", "required field missing")]);
    }

    #[test]
    fn element_symbols() {
        assert_eq!(element_z("Pu"), Ok(94));
        assert_eq!(element_z("u"), Ok(92));
        assert_eq!(element_z("94"), Ok(94));
        assert!(element_z("Xx").is_err());
    }

    #[test]
    fn diff_reports_single_leaf() {
        let a = ConfigNode::new("r")
            .with(ConfigNode::new("fuel").with_leaf("out", "waste"))
            .with(ConfigNode::new("fuel").with_leaf("out", "waste"));
        let mut b = a.clone();
        b.children[1].children[0].text = Some("spent_fuel".into());
        let mut d = Vec::new();
        a.diff(&b, "", &mut d);
        assert_eq!(d, vec![r#"r/fuel[1]/out: "waste" != "spent_fuel""#.to_string()]);
    }
}
