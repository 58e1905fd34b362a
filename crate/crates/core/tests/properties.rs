use proptest::prelude::*;

use walras::auctions::{ascending, default_start, descending, extract_allocation, replay, AuctionMode, AuctionOptions};
use walras::bruteforce::{
    brute_min_max_set, brute_polymatroid_sum, brute_walrasian, enumerate_demand, enumerate_preferred, DemandProfile,
    EnumerationBudget,
};
use walras::demand_sets::{lyapunov, min_max_set, DemandKind};
use walras::generate::{generate, Family, GenParams};
use walras::model::{exchange, BoxShape, Bundle, Instance, ItemSet, PriceVector};
use walras::polymatroid_sum::{check_certificate, solve, SolverMode, SolverOptions};
use walras::valuations::{
    copy_to_unit_supply, demand, indirect_utility, project_bundle, BuyerOracle, DemandSide, OracleCounters, Valuation,
};

const FAMILIES: [Family; 6] =
    [Family::UnitDemand, Family::Additive, Family::MatroidRank, Family::Oxs, Family::Table, Family::Mixed];

fn market(max_items: usize, max_supply: u32, max_cap: i64) -> impl Strategy<Value = Instance> {
    (0..FAMILIES.len(), 1..=max_items, 1usize..=3, 1..=max_supply, 0..=max_cap, any::<u64>()).prop_map(
        |(f, items, buyers, max_supply, value_cap, seed)| {
            generate(&GenParams { family: FAMILIES[f], items, buyers, max_supply, value_cap, seed }).unwrap()
        },
    )
}

fn market_and_prices(max_items: usize, max_supply: u32, max_cap: i64) -> impl Strategy<Value = (Instance, PriceVector)> {
    market(max_items, max_supply, max_cap).prop_flat_map(|inst| {
        let top = inst.max_full_value() + 1;
        let m = inst.items();
        (Just(inst), proptest::collection::vec(0..=top, m)).prop_map(|(inst, p)| (inst, PriceVector::new(p).unwrap()))
    })
}

/// OXS buyers whose edges all weigh one: heavy ties, large exchange weights.
fn tied_oxs_market() -> impl Strategy<Value = Instance> {
    proptest::collection::vec(1u32..=3, 1..=3).prop_flat_map(|supply| {
        let m = supply.len();
        let buyer = (1usize..=3, proptest::collection::vec(any::<bool>(), m * 3)).prop_map(move |(right, mask)| {
            let edges = (0..m)
                .flat_map(|e| (0..right).map(move |r| (e, r)))
                .filter(|&(e, r)| mask[e * 3 + r])
                .map(|(e, r)| (e, r, 1))
                .collect();
            Valuation::oxs(right, edges)
        });
        (Just(supply), proptest::collection::vec(buyer, 1..=3))
            .prop_map(|(supply, buyers)| Instance::new(supply, buyers).unwrap())
    })
}

fn sides() -> [DemandSide; 2] {
    [DemandSide::Minimal, DemandSide::Maximal]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn greedy_demand_matches_enumeration((inst, p) in market_and_prices(4, 3, 12)) {
        let budget = EnumerationBudget::default();
        for v in inst.valuations() {
            let all = enumerate_preferred(v, inst.supply(), &p, &budget).unwrap();
            let best = all.iter().map(|z| v.value(z) - p.dot(z)).max().unwrap();
            let iu = indirect_utility(v, inst.supply(), &p);
            prop_assert_eq!(iu.value, best);
            for side in sides() {
                let z = demand(v, inst.supply(), &p, side);
                let set = enumerate_demand(v, inst.supply(), &p, side, &budget).unwrap();
                prop_assert!(set.contains(&z), "greedy {} bundle {} not in {:?}", side.name(), z, set);
            }
        }
    }

    #[test]
    fn exchange_weights_match_enumeration((inst, p) in market_and_prices(4, 3, 12)) {
        let budget = EnumerationBudget::default();
        let mut counters = OracleCounters::default();
        for side in sides() {
            for i in 0..inst.buyer_count() {
                let set = enumerate_demand(inst.valuation(i), inst.supply(), &p, side, &budget).unwrap();
                let oracle = BuyerOracle::new(&inst, i, &p, side, true, &mut counters);
                for z in &set {
                    for e in 0..inst.items() {
                        for f in 0..inst.items() {
                            let w = oracle.exchange_weight(z, e, f, &mut counters).unwrap();
                            let brute = if e == f {
                                0
                            } else {
                                (0..=z[f].min(inst.supply()[e] - z[e]))
                                    .take_while(|&a| set.contains(&exchange(z, e, f, a, inst.supply()).unwrap()))
                                    .last()
                                    .unwrap()
                            };
                            prop_assert_eq!(w, brute);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn solver_matches_min_max((inst, p) in market_and_prices(4, 3, 12)) {
        let budget = EnumerationBudget::default();
        for side in sides() {
            for mode in [None, Some(SolverMode::MultiSupply)] {
                let sol = solve(&inst, &p, side, SolverOptions { checks: true, mode }).unwrap();
                let brute = brute_polymatroid_sum(&inst, &p, side, &budget).unwrap();
                prop_assert_eq!(brute.primal, brute.dual);
                prop_assert_eq!(sol.value, brute.primal);
                prop_assert!(check_certificate(&inst, &p, side, &sol.bundles, sol.certificate, &budget).unwrap());
            }
        }
    }

    #[test]
    fn solver_matches_on_tied_markets(inst in tied_oxs_market(), p in proptest::collection::vec(0i64..=2, 3)) {
        let p = PriceVector::new(p[..inst.items()].to_vec()).unwrap();
        let budget = EnumerationBudget::default();
        for side in sides() {
            let sol = solve(&inst, &p, side, SolverOptions::checked()).unwrap();
            prop_assert_eq!(sol.value, brute_polymatroid_sum(&inst, &p, side, &budget).unwrap().primal);
            prop_assert!(check_certificate(&inst, &p, side, &sol.bundles, sol.certificate, &budget).unwrap());
            for kind in [DemandKind::Overdemanded, DemandKind::Underdemanded] {
                let report = min_max_set(&inst, &p, kind, SolverOptions::checked()).unwrap();
                let (set, magnitude) = brute_min_max_set(&inst, &p, kind, &budget).unwrap();
                prop_assert_eq!(report.magnitude, magnitude);
                prop_assert_eq!(report.set, if magnitude > 0 { set } else { ItemSet::EMPTY });
            }
        }
    }

    #[test]
    fn bfs_sets_match_enumeration((inst, p) in market_and_prices(4, 3, 12)) {
        let budget = EnumerationBudget::default();
        for kind in [DemandKind::Overdemanded, DemandKind::Underdemanded] {
            let report = min_max_set(&inst, &p, kind, SolverOptions::checked()).unwrap();
            let (set, magnitude) = brute_min_max_set(&inst, &p, kind, &budget).unwrap();
            prop_assert_eq!(report.magnitude, magnitude);
            prop_assert_eq!(report.set, if magnitude > 0 { set } else { ItemSet::EMPTY });
        }
    }

    #[test]
    fn steepest_descent_and_lyapunov((inst, p) in market_and_prices(4, 2, 8)) {
        let profile = DemandProfile::new(&inst, &p, &EnumerationBudget::default()).unwrap();
        let base = lyapunov(&inst, &p);
        let report = min_max_set(&inst, &p, DemandKind::Overdemanded, SolverOptions::default()).unwrap();
        let mut best = i64::MAX;
        let mut argmin = Vec::new();
        for s in ItemSet::all_subsets(inst.items()) {
            let up = lyapunov(&inst, &p.raised(s));
            prop_assert_eq!(up - base, -profile.overdemandedness(s));
            if up < best {
                best = up;
                argmin.clear();
            }
            if up == best {
                argmin.push(s);
            }
            if let Ok(q) = p.lowered(s) {
                prop_assert_eq!(lyapunov(&inst, &q) - base, -profile.underdemandedness(s));
            }
        }
        prop_assert!(argmin.contains(&report.set));
        prop_assert!(argmin.iter().all(|s| report.set.is_subset(*s)));
    }

    #[test]
    fn truncation_is_best_capped_sub_bundle(inst in market(3, 3, 10), cap in 0u32..5) {
        let shape = BoxShape::new(inst.supply()).unwrap();
        let points: Vec<Bundle> = shape.points().collect();
        for v in inst.valuations() {
            let t = v.clone().truncate(cap);
            for z in &points {
                let brute = points
                    .iter()
                    .filter(|y| y.leq(z) && y.size() <= cap as u64)
                    .map(|y| v.value(y))
                    .max()
                    .unwrap();
                prop_assert_eq!(t.value(z), brute);
            }
        }
    }

    #[test]
    fn copy_valuations_agree(inst in market(3, 3, 10)) {
        let (copied, proj) = copy_to_unit_supply(&inst).unwrap();
        let shape = BoxShape::new(copied.supply()).unwrap();
        for z in shape.points() {
            let y = project_bundle(&proj, &z);
            for i in 0..inst.buyer_count() {
                prop_assert_eq!(copied.valuation(i).value(&z), inst.valuation(i).value(&y));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn auctions_reach_lattice_extremes(inst in prop_oneof![market(3, 2, 10), tied_oxs_market()]) {
        let w = brute_walrasian(&inst, &EnumerationBudget::default()).unwrap();
        prop_assert!(w.is_lattice);
        let (asc, trace) = ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::checked()).unwrap();
        prop_assert_eq!(Some(asc.clone()), w.minimal.clone());
        prop_assert!(trace.rounds.windows(2).all(|r| r[0].prices.leq(&r[1].prices)));
        let (desc, trace) = descending(&inst, default_start(&inst, AuctionMode::Descending), AuctionOptions::checked()).unwrap();
        prop_assert_eq!(Some(desc.clone()), w.maximal.clone());
        prop_assert!(trace.rounds.windows(2).all(|r| r[1].prices.leq(&r[0].prices)));
        for p in [asc, desc] {
            let alloc = extract_allocation(&inst, &p, SolverOptions::checked()).unwrap();
            prop_assert_eq!(alloc.totals(inst.items()), inst.supply().to_vec());
        }
    }

    #[test]
    fn replay_reproduces_and_detects_tampering(inst in market(3, 2, 8)) {
        let (_, trace) = ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::default()).unwrap();
        let report = replay(&inst, &trace, AuctionOptions::default()).unwrap();
        prop_assert!(report.consistent);
        if let Some(first) = trace.rounds.first() {
            let mut bad = trace.clone();
            bad.rounds[0].set = first.set.complement(inst.items()).union(ItemSet::singleton(0));
            bad.rounds[0].prices = bad.start.raised(bad.rounds[0].set);
            if bad.rounds[0].set != first.set {
                let report = replay(&inst, &bad, AuctionOptions::default()).unwrap();
                prop_assert_eq!(report.first_divergence, Some(0));
            }
        }
    }
}
