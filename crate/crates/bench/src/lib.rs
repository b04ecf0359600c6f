//! Workload generators shared by the benchmarks.

use std::path::PathBuf;

use fck_core::exchange::{Bid, BidPortfolio, CapacityConstraint, ExchangeGraph, Market, Request, RequestPortfolio};
use fck_core::scenario::ScenarioDoc;
use fck_core::AgentId;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A market where each of `requesters` asks for one commodity out of
/// `commodities` and every one of `suppliers` bids on a random subset of
/// the matching requests under one shared capacity.
pub fn market(requesters: usize, suppliers: usize, commodities: usize, seed: u64) -> ExchangeGraph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut m = Market::new();
    let mut posted = Vec::new();
    for r in 0..requesters {
        let c = format!("c{}", rng.random_range(0..commodities));
        let req = Request::new(c.clone(), rng.random_range(1.0..100.0))
            .with_preference(rng.random_range(0.1..10.0));
        let ids = m.post_requests(AgentId(r as u32), RequestPortfolio::single(req)).unwrap();
        posted.push((ids[0], c));
    }
    for s in 0..suppliers {
        let mine = format!("c{}", rng.random_range(0..commodities));
        let mut port = BidPortfolio::new();
        for (id, c) in &posted {
            if *c == mine && rng.random_bool(0.7) {
                port.push(Bid::new(*id, rng.random_range(1.0..100.0)));
            }
        }
        if !port.is_empty() {
            let cap = rng.random_range(10.0..300.0);
            m.post_bids(AgentId((requesters + s) as u32), port.constrain(CapacityConstraint::unit(cap)))
                .unwrap();
        }
    }
    m.graph(&m.candidate_arcs())
}

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.xml"))
}

/// A bundled scenario cut down to `months`.
pub fn scenario(name: &str, months: u64) -> ScenarioDoc {
    let mut doc = fck_core::scenario::load(&scenario_path(name)).unwrap();
    doc.control.duration = months;
    doc
}
