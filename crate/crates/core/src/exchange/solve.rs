//! Flow solvers over an [`ExchangeGraph`].

use super::graph::ExchangeGraph;
use super::simplex::{self, LpError};
use super::ExchangeError;

/// Arcs touched by fewer flows than this are treated as unused.
pub const FLOW_TOL: f64 = 1e-9;

/// Largest graph accepted by [`solve_exact_small`].
pub const EXACT_MAX_ARCS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Greedy,
    Lp,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Greedy => "greedy",
            SolverKind::Lp => "lp",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "greedy" => Ok(SolverKind::Greedy),
            "lp" => Ok(SolverKind::Lp),
            other => Err(format!("unknown solver '{other}'")),
        }
    }
}

/// Greedy fill in order of ascending cost, ties broken by supplier then
/// request. Each arc takes as much as its bound and every row's remaining
/// headroom allow; exclusive arcs take their full quantity or nothing.
pub fn solve_greedy(g: &ExchangeGraph) -> Vec<f64> {
    let n = g.arcs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&g.arcs[a], &g.arcs[b]);
        x.cost
            .total_cmp(&y.cost)
            .then(x.supplier.cmp(&y.supplier))
            .then(x.request.cmp(&y.request))
            .then(x.bid.cmp(&y.bid))
            .then(a.cmp(&b))
    });
    let mut rows_of: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (ri, r) in g.rows.iter().enumerate() {
        for &(i, c) in &r.coeffs {
            rows_of[i].push((ri, c));
        }
    }
    let mut headroom: Vec<f64> = g.rows.iter().map(|r| r.rhs).collect();
    let mut x = vec![0.0; n];
    for i in order {
        let arc = &g.arcs[i];
        let q = match arc.exclusive {
            Some(q) => {
                let fits = q.is_finite()
                    && q <= arc.upper
                    && rows_of[i]
                        .iter()
                        .all(|&(r, c)| c * q <= headroom[r] + FLOW_TOL * (1.0 + headroom[r].abs()));
                if fits { q } else { 0.0 }
            }
            None => {
                let mut q = arc.upper;
                for &(r, c) in &rows_of[i] {
                    if c > 0.0 {
                        q = q.min(headroom[r].max(0.0) / c);
                    }
                }
                if q > FLOW_TOL { q } else { 0.0 }
            }
        };
        if q > 0.0 {
            x[i] = q;
            for &(r, c) in &rows_of[i] {
                headroom[r] -= c * q;
            }
        }
    }
    x
}

/// Result of an optimizing solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LpFlows {
    pub flows: Vec<f64>,
    /// `Σ cost · x`
    pub cost: f64,
    /// `Σ (cost - penalty) · x`, the minimized quantity.
    pub objective: f64,
}

fn lp_over(g: &ExchangeGraph, free: &[usize], fixed: &[(usize, f64)]) -> Result<Vec<f64>, LpError> {
    let penalty = g.unmet_penalty();
    let col_of: std::collections::HashMap<usize, usize> =
        free.iter().enumerate().map(|(c, &i)| (i, c)).collect();
    let c: Vec<f64> = free.iter().map(|&i| g.arcs[i].cost - penalty).collect();
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for r in &g.rows {
        let mut row = vec![0.0; free.len()];
        let mut rhs = r.rhs;
        let mut touches = false;
        for &(i, coef) in &r.coeffs {
            if let Some(&col) = col_of.get(&i) {
                row[col] += coef;
                touches = true;
            } else if let Some(&(_, q)) = fixed.iter().find(|(j, _)| *j == i) {
                rhs -= coef * q;
            }
        }
        if touches {
            a.push(row);
            b.push(rhs);
        } else if rhs < -FLOW_TOL * (1.0 + r.rhs.abs()) {
            return Err(LpError::Infeasible);
        }
    }
    for (col, &i) in free.iter().enumerate() {
        let mut row = vec![0.0; free.len()];
        row[col] = 1.0;
        a.push(row);
        b.push(g.arcs[i].upper);
    }
    let sol = simplex::minimize(&c, &a, &b)?;
    let mut x = vec![0.0; g.arcs.len()];
    for (col, &i) in free.iter().enumerate() {
        let v = sol.x[col].min(g.arcs[i].upper);
        x[i] = if v > FLOW_TOL { v } else { 0.0 };
    }
    for &(i, q) in fixed {
        x[i] = q;
    }
    Ok(x)
}

fn package(g: &ExchangeGraph, flows: Vec<f64>) -> LpFlows {
    LpFlows { cost: g.cost(&flows), objective: g.objective(&flows), flows }
}

/// Optimal flows for a graph without exclusive arcs.
pub fn solve_lp(g: &ExchangeGraph) -> Result<LpFlows, ExchangeError> {
    if g.has_exclusive() {
        return Err(ExchangeError::ExclusiveInLp);
    }
    let free: Vec<usize> = (0..g.arcs.len()).collect();
    let x = lp_over(g, &free, &[]).map_err(ExchangeError::Lp)?;
    Ok(package(g, x))
}

/// Exact optimum for small graphs: tries every on/off assignment of the
/// exclusive arcs and solves the LP over the remaining arcs.
pub fn solve_exact_small(g: &ExchangeGraph) -> Result<LpFlows, ExchangeError> {
    if g.arcs.len() > EXACT_MAX_ARCS {
        return Err(ExchangeError::TooLarge { arcs: g.arcs.len(), max: EXACT_MAX_ARCS });
    }
    let exclusive: Vec<usize> = (0..g.arcs.len()).filter(|&i| g.arcs[i].is_exclusive()).collect();
    let regular: Vec<usize> = (0..g.arcs.len()).filter(|&i| !g.arcs[i].is_exclusive()).collect();
    let mut best: Option<LpFlows> = None;
    'masks: for mask in 0u32..(1u32 << exclusive.len()) {
        let mut fixed = Vec::new();
        for (k, &i) in exclusive.iter().enumerate() {
            if mask & (1 << k) != 0 {
                let q = g.arcs[i].exclusive.unwrap_or(f64::INFINITY);
                if !q.is_finite() || q > g.arcs[i].upper {
                    continue 'masks;
                }
                fixed.push((i, q));
            }
        }
        let x = match lp_over(g, &regular, &fixed) {
            Ok(x) => x,
            Err(LpError::Infeasible) => continue,
            Err(e) => return Err(ExchangeError::Lp(e)),
        };
        if g.residual(&x) > 1e-9 * (1.0 + g.scale()) {
            continue;
        }
        let cand = package(g, x);
        let better = match &best {
            None => true,
            Some(b) => cand.objective < b.objective - 1e-9 * (1.0 + b.objective.abs()),
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.unwrap_or_else(|| package(g, vec![0.0; g.arcs.len()])))
}
