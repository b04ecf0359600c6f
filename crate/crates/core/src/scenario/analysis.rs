//! Post-processing of output tables: metrics, provenance queries and the
//! referential-integrity audit. Everything here reads only the tables, so
//! it works the same on a finished run in memory or a directory on disk.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::output::{OutputTables, Table, TableKind};

fn col(t: &Table, name: &str) -> usize {
    t.column(name)
        .unwrap_or_else(|| panic!("{} has no column {name}", t.kind.name()))
}

fn num<T: std::str::FromStr + Default>(s: &str) -> T {
    s.parse().unwrap_or_default()
}

/// Run length recorded in the Info table.
pub fn duration(tables: &OutputTables) -> Option<u64> {
    let t = tables.table(TableKind::Info);
    let (k, v) = (col(t, "key"), col(t, "value"));
    t.rows.iter().find(|r| r[k] == "duration").and_then(|r| r[v].parse().ok())
}

fn months(tables: &OutputTables, kind: TableKind) -> u64 {
    duration(tables).unwrap_or_else(|| {
        let t = tables.table(kind);
        let c = col(t, "time");
        t.rows.iter().map(|r| num::<u64>(&r[c]) + 1).max().unwrap_or(0)
    })
}

/// System-wide elemental Pu in kg at the end of every month.
pub fn pu_inventory(tables: &OutputTables) -> Vec<(u64, f64)> {
    element_inventory(tables, 94)
}

pub fn element_inventory(tables: &OutputTables, z: u32) -> Vec<(u64, f64)> {
    let t = tables.table(TableKind::TimeSeries);
    let n = months(tables, TableKind::TimeSeries) as usize;
    let (tc, nc, kc) = (col(t, "time"), col(t, "nuclide"), col(t, "kg"));
    let mut series = vec![0.0; n];
    for r in &t.rows {
        let nuc: u32 = num(&r[nc]);
        let time: usize = num(&r[tc]);
        if nuc / 10_000 == z && time < n {
            series[time] += num::<f64>(&r[kc]);
        }
    }
    series.into_iter().enumerate().map(|(i, v)| (i as u64, v)).collect()
}

/// Total generating capacity online each month.
pub fn power(tables: &OutputTables) -> Vec<(u64, f64)> {
    let t = tables.table(TableKind::Power);
    let n = months(tables, TableKind::Power) as usize;
    let (tc, vc) = (col(t, "time"), col(t, "value"));
    let mut series = vec![0.0; n];
    for r in &t.rows {
        let time: usize = num(&r[tc]);
        if time < n {
            series[time] += num::<f64>(&r[vc]);
        }
    }
    series.into_iter().enumerate().map(|(i, v)| (i as u64, v)).collect()
}

/// Metrics the command line can compute by name.
pub const METRICS: &[&str] = &["pu_inventory", "power"];

pub fn metric(tables: &OutputTables, name: &str) -> Option<Vec<(u64, f64)>> {
    match name {
        "pu_inventory" => Some(pu_inventory(tables)),
        "power" => Some(power(tables)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentRow {
    pub id: u32,
    pub kind: String,
    pub prototype: String,
    pub archetype: String,
    pub parent: Option<u32>,
    pub entered: u64,
}

pub fn agents(tables: &OutputTables) -> BTreeMap<u32, AgentRow> {
    let t = tables.table(TableKind::AgentEntry);
    let c = |n| col(t, n);
    t.rows
        .iter()
        .map(|r| {
            let id = num(&r[c("agent_id")]);
            let row = AgentRow {
                id,
                kind: r[c("kind")].clone(),
                prototype: r[c("prototype")].clone(),
                archetype: r[c("archetype")].clone(),
                parent: r[c("parent_id")].parse().ok(),
                entered: num(&r[c("entered")]),
            };
            (id, row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeRow {
    pub id: u64,
    pub time: u64,
    pub supplier: u32,
    pub requester: u32,
    pub commodity: String,
    pub resource: u64,
    pub quantity: f64,
}

pub fn trades(tables: &OutputTables) -> Vec<TradeRow> {
    let t = tables.table(TableKind::Transactions);
    let c = |n| col(t, n);
    t.rows
        .iter()
        .map(|r| TradeRow {
            id: num(&r[c("transaction_id")]),
            time: num(&r[c("time")]),
            supplier: num(&r[c("supplier")]),
            requester: num(&r[c("requester")]),
            commodity: r[c("commodity")].clone(),
            resource: num(&r[c("resource_id")]),
            quantity: num(&r[c("quantity")]),
        })
        .collect()
}

/// kg traded per commodity over the whole run.
pub fn traded_mass(tables: &OutputTables) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for t in trades(tables) {
        *out.entry(t.commodity).or_insert(0.0) += t.quantity;
    }
    out
}

/// Months in which `agent` transmuted material, which for reactors are the
/// discharge months.
pub fn transmute_times(tables: &OutputTables, agent: u32) -> Vec<u64> {
    let t = tables.table(TableKind::Resources);
    let (oc, tc, cc) = (col(t, "op"), col(t, "time"), col(t, "creator"));
    let mut out: Vec<u64> = t
        .rows
        .iter()
        .filter(|r| r[oc] == "transmute" && num::<u32>(&r[cc]) == agent)
        .map(|r| num(&r[tc]))
        .collect();
    out.dedup();
    out
}

/// Months in which an agent of `archetype` delivered `commodity`.
pub fn deliveries(tables: &OutputTables, archetype: &str, commodity: &str) -> Vec<u64> {
    let ag = agents(tables);
    let mut out: Vec<u64> = trades(tables)
        .into_iter()
        .filter(|t| {
            t.commodity == commodity
                && ag.get(&t.supplier).is_some_and(|a| a.archetype == archetype)
        })
        .map(|t| t.time)
        .collect();
    out.dedup();
    out
}

/// Parent links of every recorded resource.
pub fn resource_parents(tables: &OutputTables) -> BTreeMap<u64, Vec<u64>> {
    let t = tables.table(TableKind::Resources);
    let (ic, pc) = (col(t, "resource_id"), col(t, "parents"));
    let mut out: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for r in &t.rows {
        let id: u64 = num(&r[ic]);
        let entry = out.entry(id).or_default();
        for p in r[pc].split_whitespace().filter_map(|p| p.parse::<u64>().ok()) {
            if p != id && !entry.contains(&p) {
                entry.push(p);
            }
        }
    }
    out
}

/// Result of a provenance query over the trades into one archetype.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProvenanceReport {
    /// Resources delivered to the receiving archetype.
    pub inputs: usize,
    /// Of those, how many have a resource supplied by the source archetype
    /// among their ancestors (or are such a resource).
    pub descended: usize,
    pub examples: Vec<u64>,
}

/// Walk the resource graph from every delivery into an agent of archetype
/// `to`, looking for resources that an agent of archetype `from` supplied.
pub fn provenance(tables: &OutputTables, from: &str, to: &str) -> ProvenanceReport {
    let ag = agents(tables);
    let is = |id: u32, arch: &str| ag.get(&id).is_some_and(|a| a.archetype == arch);
    let all = trades(tables);
    let marked: BTreeSet<u64> =
        all.iter().filter(|t| is(t.supplier, from)).map(|t| t.resource).collect();
    let parents = resource_parents(tables);
    let mut report = ProvenanceReport::default();
    for t in all.iter().filter(|t| is(t.requester, to)) {
        report.inputs += 1;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([t.resource]);
        while let Some(r) = queue.pop_front() {
            if !seen.insert(r) {
                continue;
            }
            if marked.contains(&r) {
                report.descended += 1;
                if report.examples.len() < 5 {
                    report.examples.push(t.resource);
                }
                break;
            }
            queue.extend(parents.get(&r).into_iter().flatten().copied());
        }
    }
    report
}

/// Check that every foreign key in the tables resolves. Returns one line
/// per violation.
pub fn audit(tables: &OutputTables) -> Vec<String> {
    let mut out = Vec::new();
    let ag = agents(tables);
    for a in ag.values() {
        if let Some(p) = a.parent {
            if !ag.contains_key(&p) || p >= a.id {
                out.push(format!("AgentEntry {}: parent {p} not entered before it", a.id));
            }
        }
    }
    let agent_ref = |table: TableKind, column: &str, out: &mut Vec<String>| {
        let t = tables.table(table);
        let c = col(t, column);
        for (i, r) in t.rows.iter().enumerate() {
            if r[c].is_empty() {
                continue;
            }
            if !ag.contains_key(&num::<u32>(&r[c])) {
                out.push(format!("{} row {i}: unknown agent {} in {column}", table.name(), r[c]));
            }
        }
    };
    agent_ref(TableKind::AgentExit, "agent_id", &mut out);
    agent_ref(TableKind::Transactions, "supplier", &mut out);
    agent_ref(TableKind::Transactions, "requester", &mut out);
    agent_ref(TableKind::TimeSeries, "agent_id", &mut out);
    agent_ref(TableKind::Power, "agent_id", &mut out);
    agent_ref(TableKind::Resources, "creator", &mut out);
    agent_ref(TableKind::Diagnostics, "agent_id", &mut out);
    agent_ref(TableKind::ExchangeArcs, "supplier", &mut out);
    agent_ref(TableKind::ExchangeArcs, "requester", &mut out);

    let comps: BTreeSet<String> = {
        let t = tables.table(TableKind::Compositions);
        let c = col(t, "comp_id");
        t.rows.iter().map(|r| r[c].clone()).collect()
    };
    let t = tables.table(TableKind::Resources);
    let (ic, cc, pc) = (col(t, "resource_id"), col(t, "comp_id"), col(t, "parents"));
    let mut resources = BTreeSet::new();
    for (i, r) in t.rows.iter().enumerate() {
        let id: u64 = num(&r[ic]);
        if !r[cc].is_empty() && !comps.contains(&r[cc]) {
            out.push(format!("Resources row {i}: composition {} not recorded", r[cc]));
        }
        for p in r[pc].split_whitespace() {
            let p: u64 = num(p);
            if !resources.contains(&p) && p != id {
                out.push(format!("Resources row {i}: parent {p} not recorded before it"));
            }
        }
        resources.insert(id);
    }
    for tr in trades(tables) {
        if !resources.contains(&tr.resource) {
            out.push(format!("Transactions {}: resource {} not recorded", tr.id, tr.resource));
        }
    }
    out
}
