//! Dynamic resource exchange: requests and bids are gathered into a flow
//! graph, preferences are adjusted up the region/institution hierarchy, the
//! graph is solved and the resulting flows are executed as trades.

mod graph;
pub mod simplex;
mod solve;
mod types;

pub use graph::{ExchangeGraph, GraphArc, Market, PrefArc, Row, RowKind};
pub use simplex::{LpError, LpSolution};
pub use solve::{
    solve_exact_small, solve_greedy, solve_lp, LpFlows, SolverKind, EXACT_MAX_ARCS, FLOW_TOL,
};
pub use types::*;

use thiserror::Error;

use crate::kernel::AgentId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExchangeError {
    #[error("agent {0} posted an empty request portfolio")]
    EmptyPortfolio(AgentId),
    #[error("bad request from agent {agent}: {reason}")]
    BadRequest { agent: AgentId, reason: String },
    #[error("bad bid from agent {agent}: {reason}")]
    BadBid { agent: AgentId, reason: String },
    #[error("constraint capacity {capacity} from agent {agent} must be non-negative")]
    BadConstraint { agent: AgentId, capacity: f64 },
    #[error("bid references unknown request {0}")]
    UnknownRequest(RequestId),
    #[error("the LP solver cannot handle exclusive arcs")]
    ExclusiveInLp,
    #[error("graph has {arcs} arcs; the exact solver accepts at most {max}")]
    TooLarge { arcs: usize, max: usize },
    #[error("LP failure: {0}")]
    Lp(LpError),
    #[error("agent {agent} provided {provided} for a trade of {expected}")]
    WrongQuantity { agent: AgentId, expected: f64, provided: f64 },
}
