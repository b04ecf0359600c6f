use fck_core::toolkit::{
    solve_build, swu_required, value_fn, Assays, BuildOption, BuildProblem,
    CommodityProducerManager, SymbFunction, ToolkitError,
};
use fck_core::AgentId;
use proptest::prelude::*;

/// Cheapest feasible cost by exhaustive search.
fn brute_force(p: &BuildProblem) -> f64 {
    fn go(p: &BuildProblem, k: usize, y: &mut Vec<u64>, best: &mut f64) {
        if k == p.options.len() {
            if p.capacity_of(y) >= p.demand - 1e-9 * p.demand.max(1.0) {
                *best = best.min(p.cost_of(y));
            }
            return;
        }
        let limit = (p.demand / p.options[k].capacity).ceil() as u64;
        for n in 0..=limit {
            y.push(n);
            go(p, k + 1, y, best);
            y.pop();
        }
    }
    let mut best = f64::INFINITY;
    go(p, 0, &mut Vec::new(), &mut best);
    best
}

fn option() -> impl Strategy<Value = BuildOption> {
    (0.5..50.0f64, 0.0..100.0f64).prop_map(|(capacity, cost)| BuildOption { capacity, cost })
}

proptest! {
    #[test]
    fn build_matches_exhaustive_search(
        options in prop::collection::vec(option(), 1..=3),
        demand in 0.0..150.0f64,
    ) {
        let p = BuildProblem::new(options, demand);
        let y = solve_build(&p).unwrap();
        prop_assert!(p.is_feasible(&y));
        let want = brute_force(&p);
        prop_assert!((p.cost_of(&y) - want).abs() <= 1e-9 * want.max(1.0),
            "{y:?} costs {} want {want}", p.cost_of(&y));
    }

    #[test]
    fn swu_scales_linearly(
        xt in 0.001..0.005f64,
        dxf in 0.0005..0.01f64,
        dxp in 0.0..0.5f64,
        q in 0.1..1e5f64,
        k in 1.0..10.0f64,
    ) {
        let a = Assays::new(xt + dxf, xt + dxf + dxp, xt).unwrap();
        let one = swu_required(&a, q).unwrap();
        let many = swu_required(&a, k * q).unwrap();
        prop_assert!((many.swu - k * one.swu).abs() <= 1e-9 * many.swu.max(1e-9));
        prop_assert!((one.feed - one.tails - q).abs() <= 1e-9 * one.feed);
        prop_assert!(one.swu >= 0.0);
        // U-235 balance
        let u235 = one.feed * a.feed - q * a.product - one.tails * a.tails;
        prop_assert!(u235.abs() <= 1e-9 * one.feed);
    }

    #[test]
    fn value_function_is_symmetric(x in 0.0001..0.9999f64) {
        prop_assert!((value_fn(x) - value_fn(1.0 - x)).abs() <= 1e-12 * value_fn(x).abs().max(1.0));
        prop_assert!(value_fn(x) >= 0.0);
    }
}

#[test]
fn build_edge_cases() {
    let opt = |capacity, cost| BuildOption { capacity, cost };
    assert_eq!(solve_build(&BuildProblem::new(vec![opt(10.0, 1.0)], 0.0)).unwrap(), vec![0]);
    assert_eq!(solve_build(&BuildProblem::new(vec![opt(10.0, 1.0)], 25.0)).unwrap(), vec![3]);
    // One big unit is cheaper than three small ones.
    let y = solve_build(&BuildProblem::new(vec![opt(10.0, 4.0), opt(30.0, 10.0)], 25.0)).unwrap();
    assert_eq!(y, vec![0, 1]);
    assert!(matches!(
        solve_build(&BuildProblem::new(vec![], 5.0)),
        Err(ToolkitError::InfeasibleBuild(_))
    ));
    for bad in [
        BuildProblem::new(vec![opt(0.0, 1.0)], 5.0),
        BuildProblem::new(vec![opt(1.0, -1.0)], 5.0),
        BuildProblem::new(vec![opt(1.0, 1.0)], f64::NAN),
        BuildProblem::new(vec![opt(1.0, 1.0)], -1.0),
    ] {
        assert!(matches!(solve_build(&bad), Err(ToolkitError::BadBuildProblem(_))), "{bad:?}");
    }
}

#[test]
fn enrichment_reference_point() {
    // 1 kg of 4.5 % product from natural feed with 0.25 % tails.
    let a = Assays::new(0.00711, 0.045, 0.0025).unwrap();
    let n = swu_required(&a, 1.0).unwrap();
    let feed = (0.045 - 0.0025) / (0.00711 - 0.0025);
    assert!((n.feed - feed).abs() < 1e-12);
    let swu = value_fn(0.045) + (feed - 1.0) * value_fn(0.0025) - feed * value_fn(0.00711);
    assert!((n.swu - swu).abs() < 1e-12);
    assert!(n.swu > 6.0 && n.swu < 7.5, "{}", n.swu);
    assert_eq!(value_fn(0.5), 0.0);
}

#[test]
fn assay_ordering_is_enforced() {
    for (f, p, t) in [
        (0.007, 0.045, 0.007),
        (0.007, 0.045, 0.008),
        (0.05, 0.045, 0.002),
        (0.007, 1.0, 0.002),
        (0.007, 0.045, 0.0),
    ] {
        assert!(matches!(Assays::new(f, p, t), Err(ToolkitError::AssayOrder { .. })), "{f} {p} {t}");
    }
    let a = Assays::new(0.007, 0.045, 0.002).unwrap();
    assert!(matches!(swu_required(&a, -1.0), Err(ToolkitError::BadQuantity(_))));
    assert!(matches!(swu_required(&a, f64::INFINITY), Err(ToolkitError::BadQuantity(_))));
}

#[test]
fn symbolic_functions() {
    let f = SymbFunction::from_params("linear", "2 1").unwrap();
    assert_eq!(f.eval(3.0), 7.0);
    let g = SymbFunction::from_params("exp", "2 0 1").unwrap();
    assert_eq!(g.eval(100.0), 3.0);
    let p = SymbFunction::piecewise(vec![(10.0, g.clone()), (0.0, f.clone())]).unwrap();
    assert_eq!(p.eval(-1.0), 0.0);
    assert_eq!(p.eval(9.0), 19.0);
    assert_eq!(p.eval(10.0), 3.0);
    assert!(SymbFunction::piecewise(vec![]).is_err());
    assert!(SymbFunction::piecewise(vec![(0.0, f.clone()), (0.0, g)]).is_err());
    assert!(SymbFunction::from_params("linear", "1").is_err());
    assert!(SymbFunction::from_params("linear", "a b").is_err());
    assert!(SymbFunction::from_params("cubic", "1 2 3 4").is_err());
}

#[test]
fn producer_manager_tracks_capacity() {
    let mut m = CommodityProducerManager::new();
    m.register(AgentId(1), "power", 1.0);
    m.register(AgentId(2), "power", 2.5);
    m.register(AgentId(2), "heat", 4.0);
    assert_eq!(m.supply("power"), 3.5);
    assert_eq!(m.supply_where("power", |a| a == AgentId(1)), 1.0);
    assert_eq!(m.producers_of("heat").collect::<Vec<_>>(), vec![AgentId(2)]);
    m.unregister(AgentId(2));
    assert_eq!(m.supply("power"), 1.0);
    assert_eq!(m.supply("heat"), 0.0);
}
