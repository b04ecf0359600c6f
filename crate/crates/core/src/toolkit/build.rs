//! Minimum-cost integer build decisions.
//!
//! ```text
//! min Σ cost_i · y_i   s.t.  Σ capacity_i · y_i ≥ demand,  y_i ∈ ℕ
//! ```
//!
//! Solved by depth-first branch and bound. The bound at each node is the LP
//! relaxation of the remaining covering problem, which for a single
//! constraint is the residual demand priced at the best remaining
//! cost/capacity ratio.

use super::ToolkitError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOption {
    pub capacity: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildProblem {
    pub options: Vec<BuildOption>,
    pub demand: f64,
}

const TOL: f64 = 1e-9;

impl BuildProblem {
    pub fn new(options: Vec<BuildOption>, demand: f64) -> Self {
        BuildProblem { options, demand }
    }

    fn validate(&self) -> Result<(), ToolkitError> {
        if !(self.demand >= 0.0) || !self.demand.is_finite() {
            return Err(ToolkitError::BadBuildProblem(format!("demand {}", self.demand)));
        }
        for (i, o) in self.options.iter().enumerate() {
            if !(o.capacity > 0.0) || !o.capacity.is_finite() || !(o.cost >= 0.0) || !o.cost.is_finite() {
                return Err(ToolkitError::BadBuildProblem(format!(
                    "option {i}: capacity {} cost {}",
                    o.capacity, o.cost
                )));
            }
        }
        if self.demand > 0.0 && self.options.is_empty() {
            return Err(ToolkitError::InfeasibleBuild(self.demand));
        }
        Ok(())
    }

    pub fn cost_of(&self, y: &[u64]) -> f64 {
        self.options.iter().zip(y).map(|(o, &n)| o.cost * n as f64).sum()
    }

    pub fn capacity_of(&self, y: &[u64]) -> f64 {
        self.options.iter().zip(y).map(|(o, &n)| o.capacity * n as f64).sum()
    }

    pub fn is_feasible(&self, y: &[u64]) -> bool {
        self.capacity_of(y) >= self.demand - TOL * self.demand.max(1.0)
    }

    /// Preference order between two feasible plans: cheaper first, then fewer
    /// units, then more units of lower-indexed options.
    pub fn better(&self, a: &[u64], b: &[u64]) -> bool {
        let (ca, cb) = (self.cost_of(a), self.cost_of(b));
        let scale = TOL * ca.abs().max(cb.abs()).max(1.0);
        if ca < cb - scale {
            return true;
        }
        if ca > cb + scale {
            return false;
        }
        let (ua, ub): (u64, u64) = (a.iter().sum(), b.iter().sum());
        if ua != ub {
            return ua < ub;
        }
        a > b
    }
}

fn units_needed(residual: f64, capacity: f64) -> u64 {
    if residual <= TOL {
        0
    } else {
        (residual / capacity - TOL).ceil().max(0.0) as u64
    }
}

struct Search<'a> {
    p: &'a BuildProblem,
    /// best cost/capacity ratio among options k.. for each k
    tail_ratio: Vec<f64>,
    best: Option<Vec<u64>>,
    current: Vec<u64>,
}

impl Search<'_> {
    fn best_cost(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| self.p.cost_of(b))
    }

    fn visit(&mut self, k: usize, residual: f64, cost: f64) {
        let n = self.p.options.len();
        if residual <= TOL * self.p.demand.max(1.0) {
            let cand = self.current.clone();
            if self.best.as_ref().is_none_or(|b| self.p.better(&cand, b)) {
                self.best = Some(cand);
            }
            return;
        }
        if k == n {
            return;
        }
        let bound = cost + residual * self.tail_ratio[k];
        if bound > self.best_cost() + TOL * self.best_cost().abs().max(1.0) {
            return;
        }
        let opt = self.p.options[k];
        let max_units = units_needed(residual, opt.capacity);
        if k + 1 == n {
            self.current[k] = max_units;
            self.visit(n, residual - max_units as f64 * opt.capacity, cost + max_units as f64 * opt.cost);
            self.current[k] = 0;
            return;
        }
        for units in (0..=max_units).rev() {
            self.current[k] = units;
            let r = residual - units as f64 * opt.capacity;
            self.visit(k + 1, r, cost + units as f64 * opt.cost);
        }
        self.current[k] = 0;
    }
}

/// Cheapest integer build plan covering the demand.
pub fn solve_build(p: &BuildProblem) -> Result<Vec<u64>, ToolkitError> {
    p.validate()?;
    let n = p.options.len();
    if p.demand <= 0.0 {
        return Ok(vec![0; n]);
    }
    let mut tail_ratio = vec![f64::INFINITY; n + 1];
    for k in (0..n).rev() {
        let o = p.options[k];
        tail_ratio[k] = tail_ratio[k + 1].min(o.cost / o.capacity);
    }
    let mut s = Search { p, tail_ratio, best: None, current: vec![0; n] };
    s.visit(0, p.demand, 0.0);
    s.best.ok_or(ToolkitError::InfeasibleBuild(p.demand))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(capacity: f64, cost: f64) -> BuildOption {
        BuildOption { capacity, cost }
    }

    #[test]
    fn zero_demand_builds_nothing() {
        let p = BuildProblem::new(vec![opt(1.0, 1.0)], 0.0);
        assert_eq!(solve_build(&p).unwrap(), vec![0]);
    }

    #[test]
    fn single_option_takes_ceiling() {
        let p = BuildProblem::new(vec![opt(0.9, 1.0)], 2.0);
        assert_eq!(solve_build(&p).unwrap(), vec![3]);
        let p = BuildProblem::new(vec![opt(1.0, 1.0)], 3.0);
        assert_eq!(solve_build(&p).unwrap(), vec![3]);
    }

    #[test]
    fn mixed_options_tie_prefers_fewer_units() {
        // (1,1) and (0,3) both cost 3; (1,1) uses fewer units
        let p = BuildProblem::new(vec![opt(1.0, 2.0), opt(0.4, 1.0)], 1.2);
        let y = solve_build(&p).unwrap();
        assert_eq!(p.cost_of(&y), 3.0);
        assert_eq!(y, vec![1, 1]);
    }

    #[test]
    fn infeasible_without_options() {
        let p = BuildProblem::new(vec![], 1.0);
        assert!(matches!(solve_build(&p), Err(ToolkitError::InfeasibleBuild(_))));
        assert_eq!(solve_build(&BuildProblem::new(vec![], 0.0)).unwrap(), Vec::<u64>::new());
        assert!(solve_build(&BuildProblem::new(vec![opt(0.0, 1.0)], 1.0)).is_err());
    }

    #[test]
    fn free_options() {
        let p = BuildProblem::new(vec![opt(1.0, 5.0), opt(0.5, 0.0)], 2.0);
        assert_eq!(solve_build(&p).unwrap(), vec![0, 4]);
    }
}
