//! Collecting requests and bids and turning them into a flow graph.

use std::collections::BTreeMap;

use super::types::*;
use super::ExchangeError;
use crate::kernel::AgentId;
use crate::resources::CompId;

/// Request/bid pairing exposed to preference adjustment.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefArc {
    pub request: RequestId,
    pub bid: BidId,
    pub supplier: AgentId,
    pub requester: AgentId,
    pub commodity: String,
    pub quantity: f64,
    pub offer: Option<CompId>,
    pub preference: f64,
}

/// Everything posted during one exchange.
#[derive(Debug, Default, Clone)]
pub struct Market {
    request_portfolios: Vec<(AgentId, RequestPortfolio)>,
    requests: Vec<PostedRequest>,
    bid_portfolios: Vec<(AgentId, BidPortfolio)>,
    bids: Vec<PostedBid>,
}

impl Market {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post_requests(
        &mut self,
        requester: AgentId,
        portfolio: RequestPortfolio,
    ) -> Result<Vec<RequestId>, ExchangeError> {
        if portfolio.requests.is_empty() {
            return Err(ExchangeError::EmptyPortfolio(requester));
        }
        for r in &portfolio.requests {
            if !(r.quantity > 0.0) || r.quantity.is_nan() {
                return Err(ExchangeError::BadRequest {
                    agent: requester,
                    reason: format!("quantity {} for '{}'", r.quantity, r.commodity),
                });
            }
            if !r.preference.is_finite() {
                return Err(ExchangeError::BadRequest {
                    agent: requester,
                    reason: format!("preference {}", r.preference),
                });
            }
        }
        check_constraints(requester, &portfolio.constraints)?;
        let pidx = self.request_portfolios.len();
        let mut ids = Vec::with_capacity(portfolio.requests.len());
        for r in &portfolio.requests {
            let id = RequestId(self.requests.len());
            self.requests.push(PostedRequest {
                id,
                requester,
                portfolio: pidx,
                request: r.clone(),
            });
            ids.push(id);
        }
        self.request_portfolios.push((requester, portfolio));
        Ok(ids)
    }

    pub fn requests(&self) -> &[PostedRequest] {
        &self.requests
    }

    pub fn request(&self, id: RequestId) -> Option<&PostedRequest> {
        self.requests.get(id.0)
    }

    pub fn requests_for<'a>(&'a self, commodity: &'a str) -> impl Iterator<Item = &'a PostedRequest> {
        self.requests
            .iter()
            .filter(move |r| r.request.commodity == commodity)
    }

    pub fn bids(&self) -> &[PostedBid] {
        &self.bids
    }

    pub fn bid(&self, id: BidId) -> Option<&PostedBid> {
        self.bids.get(id.0)
    }

    pub fn post_bids(
        &mut self,
        bidder: AgentId,
        portfolio: BidPortfolio,
    ) -> Result<Vec<BidId>, ExchangeError> {
        for b in &portfolio.bids {
            let req = self
                .requests
                .get(b.request.0)
                .ok_or(ExchangeError::UnknownRequest(b.request))?;
            if req.requester == bidder {
                return Err(ExchangeError::BadBid {
                    agent: bidder,
                    reason: format!("bid on own request {}", b.request),
                });
            }
            if !(b.quantity > 0.0) || !b.quantity.is_finite() {
                return Err(ExchangeError::BadBid {
                    agent: bidder,
                    reason: format!("quantity {} on request {}", b.quantity, b.request),
                });
            }
        }
        check_constraints(bidder, &portfolio.constraints)?;
        let pidx = self.bid_portfolios.len();
        let mut ids = Vec::with_capacity(portfolio.bids.len());
        for b in &portfolio.bids {
            let id = BidId(self.bids.len());
            self.bids.push(PostedBid { id, bidder, portfolio: pidx, bid: b.clone() });
            ids.push(id);
        }
        self.bid_portfolios.push((bidder, portfolio));
        Ok(ids)
    }

    /// One pairing per bid, carrying the request's own preference.
    pub fn candidate_arcs(&self) -> Vec<PrefArc> {
        self.bids
            .iter()
            .map(|b| {
                let r = &self.requests[b.bid.request.0];
                PrefArc {
                    request: r.id,
                    bid: b.id,
                    supplier: b.bidder,
                    requester: r.requester,
                    commodity: r.request.commodity.clone(),
                    quantity: b.bid.quantity,
                    offer: b.bid.offer,
                    preference: r.request.preference,
                }
            })
            .collect()
    }

    /// Build the flow graph from (possibly adjusted) pairings. Pairings with a
    /// non-positive preference are dropped; the rest cost `1 / preference`.
    pub fn graph(&self, arcs: &[PrefArc]) -> ExchangeGraph {
        let mut g = ExchangeGraph::default();
        let mut by_request: BTreeMap<RequestId, Vec<usize>> = BTreeMap::new();
        let mut by_req_portfolio: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut by_bid_portfolio: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for pa in arcs {
            if !(pa.preference > 0.0) {
                continue;
            }
            let r = &self.requests[pa.request.0];
            let b = &self.bids[pa.bid.0];
            let upper = r.request.quantity.min(b.bid.quantity);
            let exclusive = if b.bid.exclusive || r.request.exclusive {
                let q = if b.bid.exclusive { b.bid.quantity } else { r.request.quantity };
                let fits = q <= b.bid.quantity && q <= r.request.quantity;
                let fills = !r.request.exclusive || q >= r.request.quantity;
                Some(if fits && fills { q } else { f64::INFINITY })
            } else {
                None
            };
            let idx = g.arcs.len();
            g.arcs.push(GraphArc {
                request: pa.request,
                bid: pa.bid,
                supplier: pa.supplier,
                requester: pa.requester,
                commodity: pa.commodity.clone(),
                preference: pa.preference,
                cost: 1.0 / pa.preference,
                upper,
                exclusive,
            });
            by_request.entry(pa.request).or_default().push(idx);
            by_req_portfolio.entry(r.portfolio).or_default().push(idx);
            by_bid_portfolio.entry(b.portfolio).or_default().push(idx);
        }
        for (rid, idxs) in &by_request {
            let q = self.requests[rid.0].request.quantity;
            if q.is_finite() && idxs.len() > 1 {
                g.rows.push(Row {
                    kind: RowKind::Request(*rid),
                    rhs: q,
                    coeffs: idxs.iter().map(|&i| (i, 1.0)).collect(),
                });
            }
        }
        for (pidx, idxs) in &by_req_portfolio {
            let (owner, port) = &self.request_portfolios[*pidx];
            for c in &port.constraints {
                g.push_constraint(RowKind::Demand(*owner), c, idxs, |a| {
                    (&self.requests[a.request.0].request, &self.bids[a.bid.0].bid)
                });
            }
        }
        for (pidx, idxs) in &by_bid_portfolio {
            let (owner, port) = &self.bid_portfolios[*pidx];
            for c in &port.constraints {
                g.push_constraint(RowKind::Supply(*owner), c, idxs, |a| {
                    (&self.requests[a.request.0].request, &self.bids[a.bid.0].bid)
                });
            }
        }
        g
    }
}

fn check_constraints(agent: AgentId, cs: &[CapacityConstraint]) -> Result<(), ExchangeError> {
    for c in cs {
        if c.capacity.is_nan() || c.capacity < 0.0 {
            return Err(ExchangeError::BadConstraint { agent, capacity: c.capacity });
        }
    }
    Ok(())
}

/// Origin of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// Total flow into one request.
    Request(RequestId),
    /// Requester portfolio constraint.
    Demand(AgentId),
    /// Supplier portfolio constraint.
    Supply(AgentId),
    /// Hand-built row.
    Other,
}

/// `Σ coeff · x ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    pub rhs: f64,
    pub coeffs: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphArc {
    pub request: RequestId,
    pub bid: BidId,
    pub supplier: AgentId,
    pub requester: AgentId,
    pub commodity: String,
    pub preference: f64,
    pub cost: f64,
    /// Flow bound: the smaller of requested and offered quantity.
    pub upper: f64,
    /// All-or-nothing quantity; infinite when the arc can never be used.
    pub exclusive: Option<f64>,
}

impl GraphArc {
    /// Bare arc for hand-built graphs.
    pub fn simple(supplier: u32, request: usize, cost: f64, upper: f64) -> Self {
        GraphArc {
            request: RequestId(request),
            bid: BidId(0),
            supplier: AgentId(supplier),
            requester: AgentId(u32::MAX),
            commodity: String::new(),
            preference: 1.0 / cost,
            cost,
            upper,
            exclusive: None,
        }
    }

    pub fn is_exclusive(&self) -> bool {
        self.exclusive.is_some()
    }
}

/// Supply nodes, request nodes and the arcs between them, plus the
/// constraint rows `A x ≤ b`. Arc bounds `0 ≤ x ≤ upper` are implicit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExchangeGraph {
    pub arcs: Vec<GraphArc>,
    pub rows: Vec<Row>,
}

impl ExchangeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_arc(&mut self, arc: GraphArc) -> usize {
        self.arcs.push(arc);
        self.arcs.len() - 1
    }

    pub fn add_row(&mut self, rhs: f64, coeffs: Vec<(usize, f64)>) {
        self.rows.push(Row { kind: RowKind::Other, rhs, coeffs });
    }

    fn push_constraint<'a>(
        &mut self,
        kind: RowKind,
        c: &CapacityConstraint,
        idxs: &[usize],
        lookup: impl Fn(&GraphArc) -> (&'a Request, &'a Bid),
    ) {
        if !c.capacity.is_finite() {
            return;
        }
        let coeffs: Vec<(usize, f64)> = idxs
            .iter()
            .map(|&i| {
                let (r, b) = lookup(&self.arcs[i]);
                (i, c.coefficients.eval(r, b))
            })
            .filter(|(_, a)| *a != 0.0)
            .collect();
        if !coeffs.is_empty() {
            self.rows.push(Row { kind, rhs: c.capacity, coeffs });
        }
    }

    pub fn has_exclusive(&self) -> bool {
        self.arcs.iter().any(|a| a.is_exclusive())
    }

    /// Per-unit reward for moving flow at all. Exceeds every arc cost, so
    /// every arc has a negative objective coefficient `cost - penalty`.
    pub fn unmet_penalty(&self) -> f64 {
        1.0 + self.arcs.iter().map(|a| a.cost).fold(0.0, f64::max)
    }

    /// `Σ cost · x`.
    pub fn cost(&self, x: &[f64]) -> f64 {
        self.arcs.iter().zip(x).map(|(a, f)| a.cost * f).sum()
    }

    /// The quantity every solver minimizes: `Σ (cost - penalty) · x`.
    pub fn objective(&self, x: &[f64]) -> f64 {
        let m = self.unmet_penalty();
        self.arcs.iter().zip(x).map(|(a, f)| (a.cost - m) * f).sum()
    }

    /// Largest violation of any row or bound (zero when feasible).
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, &f) in self.arcs.iter().zip(x) {
            worst = worst.max(-f).max(f - a.upper);
        }
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().map(|&(i, c)| c * x[i]).sum();
            worst = worst.max(lhs - r.rhs);
        }
        worst
    }

    /// Largest finite right-hand side or bound, for scaling tolerances.
    pub fn scale(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.rhs.abs())
            .chain(self.arcs.iter().map(|a| a.upper))
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Violations of the all-or-nothing rule.
    pub fn exclusivity_ok(&self, x: &[f64], tol: f64) -> bool {
        self.arcs.iter().zip(x).all(|(a, &f)| match a.exclusive {
            Some(q) => f.abs() <= tol || (q.is_finite() && (f - q).abs() <= tol),
            None => true,
        })
    }
}
