//! Helpers shared by the integration tests: scenario loading, random
//! exchange graphs and a brute-force LP oracle.
#![allow(dead_code)]

use std::path::PathBuf;

use fck_core::archetypes::standard_registry;
use fck_core::exchange::{
    Bid, BidPortfolio, CapacityConstraint, ExchangeGraph, Market, Request, RequestPortfolio,
};
use fck_core::kernel::RunSummary;
use fck_core::output::OutputTables;
use fck_core::scenario::{self, ScenarioDoc};
use fck_core::AgentId;
use rand::Rng;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn scenario_path(name: &str) -> PathBuf {
    workspace_root().join("scenarios").join(format!("{name}.xml"))
}

pub fn load(name: &str) -> ScenarioDoc {
    scenario::load(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn run(name: &str) -> (OutputTables, RunSummary) {
    load(name).run(standard_registry(), None).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub const BUNDLED: &[&str] = &[
    "oncethrough",
    "onepass",
    "infpass",
    "oncethrough_10",
    "onepass_10",
    "infpass_10",
];

/// Knobs for [`random_graph`].
#[derive(Debug, Clone, Copy)]
pub struct GraphShape {
    pub max_suppliers: usize,
    pub max_requesters: usize,
    pub max_constraints: usize,
    pub max_arcs: usize,
}

/// A market with random portfolios and weighted capacity constraints on
/// both sides, turned into its exclusive-free flow graph.
pub fn random_graph(rng: &mut impl Rng, shape: GraphShape) -> ExchangeGraph {
    let mut m = Market::new();
    let nr = rng.random_range(1..=shape.max_requesters);
    let ns = rng.random_range(1..=shape.max_suppliers);
    let mut posted = Vec::new();
    for r in 0..nr {
        let mut port = RequestPortfolio::new();
        for _ in 0..rng.random_range(1..=2) {
            let q = if rng.random_bool(0.1) { f64::INFINITY } else { rng.random_range(1.0..100.0) };
            let pref = if rng.random_bool(0.05) { 0.0 } else { rng.random_range(0.2..5.0) };
            port.push(Request::new("c", q).with_preference(pref));
        }
        for _ in 0..rng.random_range(0..=shape.max_constraints) {
            port = port.constrain(constraint(rng));
        }
        posted.extend(m.post_requests(AgentId(r as u32), port).unwrap());
    }
    let mut arcs = 0;
    for s in 0..ns {
        let mut port = BidPortfolio::new();
        for &rid in &posted {
            if arcs < shape.max_arcs && rng.random_bool(0.5) {
                port.push(Bid::new(rid, rng.random_range(1.0..100.0)));
                arcs += 1;
            }
        }
        if port.is_empty() {
            continue;
        }
        for _ in 0..rng.random_range(0..=shape.max_constraints) {
            port = port.constrain(constraint(rng));
        }
        m.post_bids(AgentId(100 + s as u32), port).unwrap();
    }
    m.graph(&m.candidate_arcs())
}

fn constraint(rng: &mut impl Rng) -> CapacityConstraint {
    let cap = rng.random_range(0.0..150.0);
    if rng.random_bool(0.5) {
        CapacityConstraint::unit(cap)
    } else {
        let k: f64 = rng.random_range(0.1..3.0);
        CapacityConstraint::weighted(cap, move |r, b| {
            0.25 + ((r.quantity.min(1e6) + b.quantity) * k).fract()
        })
    }
}

/// Minimum of `g.objective` over the feasible polytope, found by solving
/// every square subsystem of tight constraints and keeping the best
/// feasible vertex. Exponential; meant for a handful of arcs.
pub fn vertex_oracle(g: &ExchangeGraph) -> f64 {
    let n = g.arcs.len();
    if n == 0 {
        return 0.0;
    }
    // Every constraint as (a, b) meaning a·x ≤ b.
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, a) in g.arcs.iter().enumerate() {
        let mut lo = vec![0.0; n];
        lo[i] = -1.0;
        cons.push((lo, 0.0));
        let mut hi = vec![0.0; n];
        hi[i] = 1.0;
        cons.push((hi, a.upper));
    }
    for r in &g.rows {
        let mut a = vec![0.0; n];
        for &(i, c) in &r.coeffs {
            a[i] += c;
        }
        cons.push((a, r.rhs));
    }
    let feasible = |x: &[f64]| {
        cons.iter().all(|(a, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            lhs <= b + 1e-7 * (1.0 + b.abs())
        })
    };
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = pick.iter().map(|&k| cons[k].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&k| cons[k].1).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) {
                best = best.min(g.objective(&x));
            }
        }
        if !next_combination(&mut pick, cons.len()) {
            break;
        }
    }
    best
}

fn next_combination(pick: &mut [usize], m: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < m - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-12 || !b[p].is_finite() {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Months in which system Pu falls by more than 1 % of its current value.
pub fn pu_drops(series: &[(u64, f64)]) -> Vec<u64> {
    series
        .windows(2)
        .filter(|w| w[1].1 < w[0].1 - 0.01 * w[0].1)
        .map(|w| w[1].0)
        .collect()
}

/// Sample standard deviation of the first differences.
pub fn diff_std(series: &[(u64, f64)]) -> f64 {
    let d: Vec<f64> = series.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64).sqrt()
}

/// sha256 of every file in a directory, by file name.
pub fn hash_dir(dir: &std::path::Path) -> std::collections::BTreeMap<String, String> {
    use sha2::{Digest, Sha256};
    let mut out = std::collections::BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let bytes = std::fs::read(&p).unwrap();
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), hex);
    }
    out
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn blessing() -> bool {
    std::env::var_os("FCK_BLESS").is_some_and(|v| v == "1")
}

/// Compare a run's file hashes with the stored manifest, or rewrite the
/// manifest when `FCK_BLESS=1`.
pub fn check_manifest(
    name: &str,
    hashes: &std::collections::BTreeMap<String, String>,
) -> Result<(), String> {
    let path = golden_dir().join(format!("{name}.sha256"));
    let text: String = hashes.iter().map(|(f, h)| format!("{h}  {f}\n")).collect();
    if blessing() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, text).unwrap();
        return Ok(());
    }
    let stored = std::fs::read_to_string(&path)
        .map_err(|e| format!("{}: {e} (run with FCK_BLESS=1 to create)", path.display()))?;
    if stored == text {
        Ok(())
    } else {
        let old: std::collections::BTreeSet<&str> = stored.lines().collect();
        let changed: Vec<&str> = text
            .lines()
            .filter(|l| !old.contains(l))
            .filter_map(|l| l.split_whitespace().nth(1))
            .collect();
        Err(format!("{name}: outputs differ from golden in {changed:?}"))
    }
}

/// Run a bundled scenario into a fresh directory and hash its tables.
pub fn run_to_dir(name: &str, dir: &std::path::Path) -> std::collections::BTreeMap<String, String> {
    load(name)
        .run(standard_registry(), Some(dir.to_path_buf()))
        .unwrap_or_else(|e| panic!("{name}: {e}"));
    hash_dir(dir)
}
