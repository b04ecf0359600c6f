//! Requests, bids and the portfolios that group them.

use std::fmt;
use std::sync::Arc;

use crate::kernel::AgentId;
use crate::resources::{CompId, ResourceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RequestId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BidId(pub usize);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for BidId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Demand for a commodity. `quantity` may be infinite for unbounded sinks.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub commodity: String,
    pub target: Option<CompId>,
    pub quantity: f64,
    pub preference: f64,
    pub exclusive: bool,
}

impl Request {
    pub fn new(commodity: impl Into<String>, quantity: f64) -> Self {
        Request {
            commodity: commodity.into(),
            target: None,
            quantity,
            preference: 1.0,
            exclusive: false,
        }
    }

    pub fn with_preference(mut self, p: f64) -> Self {
        self.preference = p;
        self
    }

    pub fn with_target(mut self, comp: CompId) -> Self {
        self.target = Some(comp);
        self
    }

    pub fn exclusive(mut self) -> Self {
        self.exclusive = true;
        self
    }
}

/// Offer against one posted request.
#[derive(Debug, Clone, PartialEq)]
pub struct Bid {
    pub request: RequestId,
    pub quantity: f64,
    pub offer: Option<CompId>,
    pub exclusive: bool,
}

impl Bid {
    pub fn new(request: RequestId, quantity: f64) -> Self {
        Bid { request, quantity, offer: None, exclusive: false }
    }

    pub fn with_offer(mut self, comp: CompId) -> Self {
        self.offer = Some(comp);
        self
    }

    pub fn exclusive(mut self) -> Self {
        self.exclusive = true;
        self
    }
}

/// Per-arc coefficient of a capacity constraint.
#[derive(Clone, Default)]
pub enum Coefficients {
    /// Every arc counts its flow once.
    #[default]
    Unit,
    Function(Arc<dyn Fn(&Request, &Bid) -> f64 + Send + Sync>),
}

impl Coefficients {
    pub fn eval(&self, req: &Request, bid: &Bid) -> f64 {
        match self {
            Coefficients::Unit => 1.0,
            Coefficients::Function(f) => f(req, bid),
        }
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Unit => f.write_str("Unit"),
            Coefficients::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// `Σ coefficient(arc) · flow(arc) ≤ capacity` over the arcs of one portfolio.
#[derive(Debug, Clone)]
pub struct CapacityConstraint {
    pub capacity: f64,
    pub coefficients: Coefficients,
}

impl CapacityConstraint {
    pub fn unit(capacity: f64) -> Self {
        CapacityConstraint { capacity, coefficients: Coefficients::Unit }
    }

    pub fn weighted(capacity: f64, f: impl Fn(&Request, &Bid) -> f64 + Send + Sync + 'static) -> Self {
        CapacityConstraint { capacity, coefficients: Coefficients::Function(Arc::new(f)) }
    }
}

/// Requests issued together by one agent.
#[derive(Debug, Clone, Default)]
pub struct RequestPortfolio {
    pub requests: Vec<Request>,
    pub constraints: Vec<CapacityConstraint>,
}

impl RequestPortfolio {
    pub fn new() -> Self {
        Self::default()
    }

    /// Requests any of which satisfies the same need: flow into all of them
    /// together is capped at `quantity`.
    pub fn mutual(requests: Vec<Request>, quantity: f64) -> Self {
        RequestPortfolio {
            requests,
            constraints: vec![CapacityConstraint::unit(quantity)],
        }
    }

    pub fn single(request: Request) -> Self {
        RequestPortfolio { requests: vec![request], constraints: Vec::new() }
    }

    pub fn push(&mut self, r: Request) -> &mut Self {
        self.requests.push(r);
        self
    }

    pub fn constrain(mut self, c: CapacityConstraint) -> Self {
        self.constraints.push(c);
        self
    }
}

/// Bids issued together by one supplier; constraints are typically inventory
/// or throughput limits.
#[derive(Debug, Clone, Default)]
pub struct BidPortfolio {
    pub bids: Vec<Bid>,
    pub constraints: Vec<CapacityConstraint>,
}

impl BidPortfolio {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, b: Bid) -> &mut Self {
        self.bids.push(b);
        self
    }

    pub fn constrain(mut self, c: CapacityConstraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }
}

/// A request as posted to the market.
#[derive(Debug, Clone)]
pub struct PostedRequest {
    pub id: RequestId,
    pub requester: AgentId,
    pub portfolio: usize,
    pub request: Request,
}

/// A bid as posted to the market.
#[derive(Debug, Clone)]
pub struct PostedBid {
    pub id: BidId,
    pub bidder: AgentId,
    pub portfolio: usize,
    pub bid: Bid,
}

/// A matched flow the supplier must fill.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeOrder {
    pub supplier: AgentId,
    pub requester: AgentId,
    pub request: RequestId,
    pub bid: BidId,
    pub commodity: String,
    pub quantity: f64,
}

/// A completed transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct Trade {
    pub supplier: AgentId,
    pub requester: AgentId,
    pub commodity: String,
    pub quantity: f64,
    pub resource: ResourceId,
    pub step: u64,
}
