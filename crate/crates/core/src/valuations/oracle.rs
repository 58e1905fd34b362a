use serde::{Deserialize, Serialize};

use super::Valuation;
use crate::bruteforce::{enumerate_demand, EnumerationBudget};
use crate::error::{invariant, Error, Result};
use crate::model::{Bundle, Instance, ItemSet, PriceVector};

/// Which end of the preferred-bundle set a query refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandSide {
    /// Preferred bundles of minimum size.
    Minimal,
    /// Preferred bundles of maximum size.
    Maximal,
}

impl DemandSide {
    pub fn name(self) -> &'static str {
        match self {
            DemandSide::Minimal => "minimal",
            DemandSide::Maximal => "maximal",
        }
    }
}

/// Oracle query counts of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounters {
    pub do_calls: u64,
    pub exo_calls: u64,
    pub value_calls: u64,
}

impl OracleCounters {
    pub fn add(&mut self, other: &OracleCounters) {
        self.do_calls += other.do_calls;
        self.exo_calls += other.exo_calls;
        self.value_calls += other.value_calls;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndirectUtility {
    /// V(p) = max_z v(z) − ⟨p, z⟩
    pub value: i64,
    pub min_size: u64,
    pub max_size: u64,
}

#[derive(Clone, Debug)]
struct GreedyPath {
    utility: i64,
    minimal: Bundle,
    maximal: Bundle,
}

/// Adds one unit of largest marginal utility at a time (lowest index on
/// ties) while the marginal is nonnegative. The first bundle reaching the
/// best utility is the minimal preferred bundle, the last one the maximal.
fn greedy(v: &Valuation, supply: &[u32], p: &PriceVector, value_calls: &mut u64) -> GreedyPath {
    let m = supply.len();
    let mut z = Bundle::zeros(m);
    let mut val = 0;
    let mut u = 0;
    let mut path = GreedyPath { utility: 0, minimal: z.clone(), maximal: z.clone() };
    loop {
        let mut best: Option<(usize, i64, i64)> = None;
        for e in 0..m {
            if z[e] < supply[e] {
                z[e] += 1;
                let ve = v.value(&z);
                z[e] -= 1;
                *value_calls += 1;
                let marginal = ve - val - p[e];
                if best.is_none_or(|(_, bm, _)| marginal > bm) {
                    best = Some((e, marginal, ve));
                }
            }
        }
        match best {
            Some((e, marginal, ve)) if marginal >= 0 => {
                z[e] += 1;
                val = ve;
                u += marginal;
                if u > path.utility {
                    path.utility = u;
                    path.minimal = z.clone();
                }
                if u == path.utility {
                    path.maximal = z.clone();
                }
            }
            _ => break,
        }
    }
    path
}

/// V(p) and the sizes of minimal and maximal preferred bundles.
pub fn indirect_utility(v: &Valuation, supply: &[u32], p: &PriceVector) -> IndirectUtility {
    let mut calls = 0;
    let path = greedy(v, supply, p, &mut calls);
    IndirectUtility { value: path.utility, min_size: path.minimal.size(), max_size: path.maximal.size() }
}

/// One minimal or maximal preferred bundle.
pub fn demand(v: &Valuation, supply: &[u32], p: &PriceVector, side: DemandSide) -> Bundle {
    let mut calls = 0;
    let path = greedy(v, supply, p, &mut calls);
    match side {
        DemandSide::Minimal => path.minimal,
        DemandSide::Maximal => path.maximal,
    }
}

/// ρ(S) = max z(S) over the minimal or maximal preferred bundles, by enumeration.
pub fn rank(
    v: &Valuation,
    supply: &[u32],
    p: &PriceVector,
    s: ItemSet,
    side: DemandSide,
    budget: &EnumerationBudget,
) -> Result<u64> {
    let set = enumerate_demand(v, supply, p, side, budget)?;
    Ok(set.iter().map(|z| z.on(s)).max().unwrap_or(0))
}

/// A buyer's view at fixed prices: answers demand and exchange queries
/// against the cached indirect utility.
#[derive(Clone, Debug)]
pub struct BuyerOracle<'a> {
    buyer: usize,
    valuation: &'a Valuation,
    supply: &'a [u32],
    prices: &'a PriceVector,
    side: DemandSide,
    path: GreedyPath,
    checks: bool,
}

impl<'a> BuyerOracle<'a> {
    pub fn new(
        inst: &'a Instance,
        buyer: usize,
        prices: &'a PriceVector,
        side: DemandSide,
        checks: bool,
        counters: &mut OracleCounters,
    ) -> Self {
        let valuation = inst.valuation(buyer);
        let path = greedy(valuation, inst.supply(), prices, &mut counters.value_calls);
        BuyerOracle { buyer, valuation, supply: inst.supply(), prices, side, path, checks }
    }

    pub fn buyer(&self) -> usize {
        self.buyer
    }

    pub fn side(&self) -> DemandSide {
        self.side
    }

    /// V(p)
    pub fn indirect_utility(&self) -> i64 {
        self.path.utility
    }

    /// Common size of the bundles in this side's demand set.
    pub fn target_size(&self) -> u64 {
        match self.side {
            DemandSide::Minimal => self.path.minimal.size(),
            DemandSide::Maximal => self.path.maximal.size(),
        }
    }

    /// The demand oracle.
    pub fn demand(&self, counters: &mut OracleCounters) -> Bundle {
        counters.do_calls += 1;
        match self.side {
            DemandSide::Minimal => self.path.minimal.clone(),
            DemandSide::Maximal => self.path.maximal.clone(),
        }
    }

    pub fn utility(&self, z: &[u32], counters: &mut OracleCounters) -> i64 {
        counters.value_calls += 1;
        self.valuation.value(z) - self.prices.dot(z)
    }

    pub fn is_member(&self, z: &Bundle, counters: &mut OracleCounters) -> bool {
        z.fits(self.supply) && z.size() == self.target_size() && self.utility(z, counters) == self.path.utility
    }

    /// The exchange oracle: largest α with z − αχ_f + αχ_e still in the demand set.
    pub fn exchange_weight(&self, z: &Bundle, e: usize, f: usize, counters: &mut OracleCounters) -> Result<u32> {
        counters.exo_calls += 1;
        if self.checks && !self.is_member(z, counters) {
            return Err(Error::NotPreferredBundle { buyer: self.buyer, side: self.side.name() });
        }
        if e == f {
            return Ok(0);
        }
        let hi_bound = z[f].min(self.supply[e].saturating_sub(z[e]));
        let mut y = z.clone();
        let mut feasible = |alpha: u32, counters: &mut OracleCounters| {
            y[f] = z[f] - alpha;
            y[e] = z[e] + alpha;
            counters.value_calls += 1;
            self.valuation.value(&y) - self.prices.dot(&y) == self.path.utility
        };
        let (mut lo, mut hi) = (0, hi_bound);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if feasible(mid, counters) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        if self.checks {
            let mut scratch = OracleCounters::default();
            let linear = (1..=hi_bound).take_while(|&a| feasible(a, &mut scratch)).last().unwrap_or(0);
            let beyond = (linear + 1..=hi_bound).any(|a| feasible(a, &mut scratch));
            if linear != lo || beyond {
                return Err(invariant(format!(
                    "exchange feasibility of buyer {} for ({e}, {f}) is not an interval [0, {lo}]",
                    self.buyer
                )));
            }
        }
        Ok(lo)
    }
}

/// T(e, z) = {e} ∪ {f : w(e, f) > 0}.
pub fn tight_set(oracle: &BuyerOracle<'_>, z: &Bundle, e: usize, counters: &mut OracleCounters) -> Result<ItemSet> {
    let mut t = ItemSet::singleton(e);
    for f in 0..z.len() {
        if f != e && oracle.exchange_weight(z, e, f, counters)? > 0 {
            t.insert(f);
        }
    }
    Ok(t)
}
