//! Small hand-made markets with known answers.
//!
//! Items are 0-based: `e1` in prose is index 0.

use crate::demand_sets::ReportedWeights;
use crate::model::{Bundle, Instance};
use crate::valuations::{TableValuation, Valuation};

fn unit_supply_set_table(m: usize, f: impl Fn(&[bool]) -> i64) -> Valuation {
    let values = TableValuation::from_fn(&vec![1; m], |z| {
        let s: Vec<bool> = z.iter().map(|&q| q > 0).collect();
        f(&s)
    })
    .expect("small box");
    Valuation::table(values)
}

/// Three unit-demand buyers on three unit-supply items.
/// `v1` is buyer 0's weight vector; buyers 1 and 2 value (0, 1, 1).
pub fn three_buyers(v1: [i64; 3]) -> Instance {
    Instance::new(
        vec![1; 3],
        vec![
            Valuation::unit_demand(v1.to_vec()),
            Valuation::unit_demand(vec![0, 1, 1]),
            Valuation::unit_demand(vec![0, 1, 1]),
        ],
    )
    .expect("valid fixture")
}

/// Minimal Walrasian prices (0, 1, 1).
pub fn three_buyers_base() -> Instance {
    three_buyers([2, 3, 0])
}

/// Minimal Walrasian prices (0, 0, 0).
pub fn three_buyers_lowered() -> Instance {
    three_buyers([2, 2, 0])
}

/// Minimal Walrasian prices (0, 1, 1) again.
pub fn three_buyers_lowered_twice() -> Instance {
    three_buyers([1, 2, 0])
}

/// Two complementarity-seeking buyers; no Walrasian prices exist.
pub fn no_equilibrium() -> Instance {
    let v1 = unit_supply_set_table(3, |s| {
        if s[0] && s[1] {
            2
        } else if s[2] {
            1
        } else {
            0
        }
    });
    let v2 = unit_supply_set_table(3, |s| {
        if s[1] && s[2] {
            2
        } else if s[0] {
            1
        } else {
            0
        }
    });
    Instance::new(vec![1; 3], vec![v1, v2]).expect("valid fixture")
}

/// Weighted "rank" over a non-matroid family; packing prices have no
/// componentwise minimum.
pub fn packing_not_lattice() -> Instance {
    let v1 = unit_supply_set_table(4, |s| {
        let a = 6 * s[..3].iter().filter(|&&x| x).count() as i64;
        a.max(if s[3] { 10 } else { 0 })
    });
    let v2 = unit_supply_set_table(4, |s| {
        let a = 6 * s[1..].iter().filter(|&&x| x).count() as i64;
        a.max(if s[0] { 10 } else { 0 })
    });
    Instance::new(vec![1; 4], vec![v1, v2]).expect("valid fixture")
}

/// Two identical table buyers where the join of two covering price
/// vectors is not covering. Maximal Walrasian prices (7, 7, 8).
pub fn covering_not_lattice() -> Instance {
    let table = unit_supply_set_table(3, |s| match (s[0], s[1], s[2]) {
        (false, false, false) => 0,
        (true, false, false) => 7,
        (false, true, false) => 7,
        (false, false, true) => 8,
        (true, true, false) => 14,
        (true, false, true) => 13,
        (false, true, true) => 13,
        (true, true, true) => 18,
    });
    Instance::new(vec![1; 3], vec![table.clone(), table]).expect("valid fixture")
}

/// Unit-demand rows whose maximal Walrasian prices move non-monotonically
/// with buyer 0's weights.
pub const UNIT_DEMAND_ROWS: [([i64; 4], [i64; 4]); 4] = [
    ([0, 9, 1, 1], [4, 8, 0, 0]),
    ([0, 9, 2, 1], [3, 7, 0, 0]),
    ([0, 9, 2, 2], [3, 7, 0, 0]),
    ([0, 10, 2, 2], [4, 8, 0, 0]),
];

/// Row `k` of [`UNIT_DEMAND_ROWS`] as a market.
pub fn unit_demand_row(k: usize) -> Instance {
    let (v1, _) = UNIT_DEMAND_ROWS[k];
    Instance::new(
        vec![1; 4],
        vec![
            Valuation::unit_demand(v1.to_vec()),
            Valuation::unit_demand(vec![6, 10, 0, 0]),
            Valuation::unit_demand(vec![4, 0, 1, 1]),
        ],
    )
    .expect("valid fixture")
}

/// Six items with two units each and three buyers (0 = blue, 1 = red,
/// 2 = green) at zero prices.
pub fn six_items() -> Instance {
    let blue = Valuation::additive(vec![1, 1, 1, 1, 0, 0]).truncate(7);
    let mut red_edges = Vec::new();
    for r in 0..3 {
        red_edges.push((0, r, 1));
        red_edges.push((2, r, 1));
    }
    red_edges.extend([(1, 0, 1), (4, 3, 1), (4, 4, 1), (5, 3, 1)]);
    let red = Valuation::oxs(5, red_edges);
    let mut green_edges = Vec::new();
    for item in [1, 2, 3] {
        for r in 0..4 {
            green_edges.push((item, r, 1));
        }
    }
    green_edges.extend([(0, 3, 1), (4, 3, 1)]);
    let green = Valuation::oxs(4, green_edges);
    Instance::new(vec![2; 6], vec![blue, red, green]).expect("valid fixture")
}

/// A minimal-bundle allocation for [`six_items`] overselling e1, e2 and
/// leaving e6 undersold.
pub fn six_items_allocation() -> Vec<Bundle> {
    vec![
        Bundle(vec![2, 2, 2, 1, 0, 0]),
        Bundle(vec![2, 1, 0, 0, 1, 1]),
        Bundle(vec![0, 2, 0, 1, 1, 0]),
    ]
}

/// The nonzero exchange weights the buyers report at that allocation.
pub fn six_items_reported_weights() -> ReportedWeights {
    ReportedWeights::new([
        ((0, 3, 0), 1),
        ((0, 3, 1), 1),
        ((0, 3, 2), 1),
        ((1, 2, 0), 2),
        ((1, 2, 1), 1),
        ((1, 4, 5), 1),
        ((2, 0, 4), 1),
        ((2, 2, 3), 1),
        ((2, 3, 1), 1),
        ((2, 3, 4), 1),
    ])
}

/// Distinct arcs (e, f) of the exchange graph for the reported weights.
pub const SIX_ITEMS_ARCS: [(usize, usize); 9] =
    [(0, 4), (2, 0), (2, 1), (2, 3), (3, 0), (3, 1), (3, 2), (3, 4), (4, 5)];
