//! Hand-computed answers on small markets.

use walras::auctions::{ascending, default_start, descending, greedy, two_phase, AuctionMode, AuctionOptions};
use walras::bruteforce::{brute_walrasian, EnumerationBudget};
use walras::demand_sets::{is_walrasian, lyapunov, min_max_set, DemandKind};
use walras::fixtures;
use walras::model::{Instance, ItemSet, PriceVector};
use walras::polymatroid_sum::SolverOptions;
use walras::valuations::Valuation;
use walras::Error;

fn pv(v: &[i64]) -> PriceVector {
    PriceVector::new(v.to_vec()).unwrap()
}

fn set(items: &[usize]) -> ItemSet {
    items.iter().fold(ItemSet::EMPTY, |s, &e| s.union(ItemSet::singleton(e)))
}

fn walrasian_prices(inst: &Instance) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = brute_walrasian(inst, &EnumerationBudget::default())
        .unwrap()
        .prices
        .iter()
        .map(|p| p.as_slice().to_vec())
        .collect();
    out.sort();
    out
}

#[test]
fn three_buyers_overdemand_at_zero() {
    let inst = fixtures::three_buyers_base();
    let r = min_max_set(&inst, &pv(&[0, 0, 0]), DemandKind::Overdemanded, SolverOptions::checked()).unwrap();
    assert_eq!(r.set, set(&[1, 2]));
    assert_eq!(r.magnitude, 1);
}

#[test]
fn three_buyers_lyapunov() {
    let inst = fixtures::three_buyers_base();
    assert_eq!(lyapunov(&inst, &pv(&[0, 0, 0])), 5);
    assert_eq!(lyapunov(&inst, &pv(&[0, 1, 1])), 4);
    assert_eq!(lyapunov(&inst, &pv(&[1, 1, 1])), 5);
}

#[test]
fn three_buyers_walrasian_sets() {
    assert_eq!(walrasian_prices(&fixtures::three_buyers_base()), vec![vec![0, 1, 1]]);
    assert_eq!(walrasian_prices(&fixtures::three_buyers_lowered()), vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 1, 1]]);
}

#[test]
fn three_buyers_every_auction_agrees() {
    let inst = fixtures::three_buyers_lowered();
    let opts = AuctionOptions::checked();
    let (p, _) = ascending(&inst, pv(&[0, 0, 0]), opts).unwrap();
    assert_eq!(p, pv(&[0, 0, 0]));
    let (p, _) = descending(&inst, default_start(&inst, AuctionMode::Descending), opts).unwrap();
    assert_eq!(p, pv(&[1, 1, 1]));
    let (p, _) = two_phase(&inst, pv(&[2, 0, 2]), opts).unwrap();
    assert!(is_walrasian(&inst, &p).unwrap());
    let (p, _) = greedy(&inst, pv(&[2, 0, 2]), opts).unwrap();
    assert!(is_walrasian(&inst, &p).unwrap());
}

#[test]
fn everything_underdemanded_at_high_prices() {
    let inst = fixtures::three_buyers_base();
    let r = min_max_set(&inst, &pv(&[5, 5, 5]), DemandKind::Underdemanded, SolverOptions::checked()).unwrap();
    assert_eq!(r.set, set(&[0, 1, 2]));
    assert_eq!(r.magnitude, 3);
    let r = min_max_set(&inst, &pv(&[5, 5, 5]), DemandKind::Overdemanded, SolverOptions::checked()).unwrap();
    assert!(!r.exists());
}

#[test]
fn single_buyer_single_item() {
    let inst = Instance::new(vec![1], vec![Valuation::unit_demand(vec![5])]).unwrap();
    assert_eq!(walrasian_prices(&inst), (0..=5).map(|x| vec![x]).collect::<Vec<_>>());
    let (lo, _) = ascending(&inst, pv(&[0]), AuctionOptions::checked()).unwrap();
    let (hi, trace) = descending(&inst, default_start(&inst, AuctionMode::Descending), AuctionOptions::checked()).unwrap();
    assert_eq!((lo, hi), (pv(&[0]), pv(&[5])));
    assert!(trace.walrasian);
}

#[test]
fn multi_unit_additive_buyer() {
    // Below 4 the additive buyer wants all three units.
    let inst = Instance::new(vec![3], vec![Valuation::additive(vec![4]), Valuation::unit_demand(vec![6])]).unwrap();
    let (lo, _) = ascending(&inst, pv(&[0]), AuctionOptions::checked()).unwrap();
    let (hi, _) = descending(&inst, default_start(&inst, AuctionMode::Descending), AuctionOptions::checked()).unwrap();
    assert_eq!((lo, hi), (pv(&[4]), pv(&[4])));
    assert_eq!(walrasian_prices(&inst), vec![vec![4]]);
}

#[test]
fn complements_have_no_equilibrium() {
    let inst = fixtures::no_equilibrium();
    assert!(walrasian_prices(&inst).is_empty());
    let err = ascending(&inst, pv(&[0, 0, 0]), AuctionOptions::default()).unwrap_err();
    assert!(matches!(err, Error::RoundLimitExceeded { .. }));
}

#[test]
fn covering_example_maximum() {
    let budget = EnumerationBudget { max_price: 19, ..Default::default() };
    let w = brute_walrasian(&fixtures::covering_not_lattice(), &budget).unwrap();
    assert_eq!(w.maximal, Some(pv(&[7, 7, 8])));
}

#[test]
fn unit_demand_rows_maximal_prices() {
    for (k, (_, expected)) in fixtures::UNIT_DEMAND_ROWS.iter().enumerate() {
        let inst = fixtures::unit_demand_row(k);
        let (p, _) = descending(&inst, default_start(&inst, AuctionMode::Descending), AuctionOptions::checked()).unwrap();
        assert_eq!(p.as_slice(), expected, "row {k}");
    }
}

/// Buyer 0 wants any three units of e1/e2; buyers 1 and 2 each want one
/// unit of a fixed item, so moving buyer 0 leaves part of its exchange unused.
fn interchangeable_units() -> Instance {
    let edges = (0..3).flat_map(|r| [(0, r, 1), (1, r, 1)]).collect();
    Instance::new(
        vec![3, 3],
        vec![Valuation::oxs(3, edges), Valuation::unit_demand(vec![1, 0]), Valuation::unit_demand(vec![0, 1])],
    )
    .unwrap()
}

#[test]
fn partial_push() {
    use walras::bruteforce::brute_polymatroid_sum;
    use walras::polymatroid_sum::solve;
    use walras::valuations::DemandSide;

    let inst = interchangeable_units();
    let p = pv(&[0, 0]);
    let sol = solve(&inst, &p, DemandSide::Minimal, SolverOptions::checked()).unwrap();
    assert_eq!(sol.value, 5);
    assert_eq!(brute_polymatroid_sum(&inst, &p, DemandSide::Minimal, &EnumerationBudget::default()).unwrap().primal, 5);
    assert_eq!(sol.counters.nonsaturating_pushes, 1);
    assert_eq!(sol.bundles[0].0, vec![1, 2]);
    assert_eq!(sol.totals(), vec![2, 3]);
}
