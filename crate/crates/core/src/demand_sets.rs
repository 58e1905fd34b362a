//! Over- and underdemanded sets, the exchange graphs, and the Lyapunov function.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bruteforce::{DemandProfile, EnumerationBudget};
use crate::error::{invariant, Result};
use crate::model::{classify_totals, Bundle, Instance, ItemSet, PriceVector};
use crate::polymatroid_sum::{solve, SolverOptions, SumSolution};
use crate::valuations::{indirect_utility, BuyerOracle, DemandSide, OracleCounters};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandKind {
    Overdemanded,
    Underdemanded,
}

impl DemandKind {
    pub fn side(self) -> DemandSide {
        match self {
            DemandKind::Overdemanded => DemandSide::Minimal,
            DemandKind::Underdemanded => DemandSide::Maximal,
        }
    }
}

/// Anything that answers exchange-weight queries w_i(e, f) at fixed bundles.
pub trait ExchangeQuery {
    fn exchange_weight(&mut self, buyer: usize, z: &Bundle, e: usize, f: usize) -> Result<u32>;
}

/// Exchange queries answered by the buyers' own oracles.
pub struct OracleQuery<'a> {
    oracles: Vec<BuyerOracle<'a>>,
    pub counters: OracleCounters,
}

impl<'a> OracleQuery<'a> {
    pub fn new(inst: &'a Instance, p: &'a PriceVector, side: DemandSide, checks: bool) -> Self {
        let mut counters = OracleCounters::default();
        let oracles = (0..inst.buyer_count())
            .map(|i| BuyerOracle::new(inst, i, p, side, checks, &mut counters))
            .collect();
        OracleQuery { oracles, counters }
    }
}

impl ExchangeQuery for OracleQuery<'_> {
    fn exchange_weight(&mut self, buyer: usize, z: &Bundle, e: usize, f: usize) -> Result<u32> {
        self.oracles[buyer].exchange_weight(z, e, f, &mut self.counters)
    }
}

/// A fixed table of exchange weights; absent entries are 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedWeights {
    pub weights: BTreeMap<(usize, usize, usize), u32>,
    pub queries: u64,
}

impl ReportedWeights {
    pub fn new(entries: impl IntoIterator<Item = ((usize, usize, usize), u32)>) -> Self {
        ReportedWeights { weights: entries.into_iter().collect(), queries: 0 }
    }
}

impl ExchangeQuery for ReportedWeights {
    fn exchange_weight(&mut self, buyer: usize, _z: &Bundle, e: usize, f: usize) -> Result<u32> {
        self.queries += 1;
        Ok(self.weights.get(&(buyer, e, f)).copied().unwrap_or(0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub buyer: usize,
    pub weight: u32,
}

/// Arc (e, f) for buyer i whenever w_i(e, f) > 0: buyer i can take e and
/// give up f without leaving its demand set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangeGraph {
    pub items: usize,
    pub side: DemandSide,
    pub arcs: Vec<Arc>,
}

impl ExchangeGraph {
    pub fn has_arc(&self, e: usize, f: usize) -> bool {
        self.arcs.iter().any(|a| a.from == e && a.to == f)
    }

    /// Distinct (from, to) pairs in order.
    pub fn arc_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.arcs.iter().map(|a| (a.from, a.to)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Items with a directed path into `targets` (targets included).
    pub fn reaching(&self, targets: ItemSet) -> ItemSet {
        self.bfs(targets, |a| (a.to, a.from))
    }

    /// Items reachable from `sources` (sources included).
    pub fn reachable_from(&self, sources: ItemSet) -> ItemSet {
        self.bfs(sources, |a| (a.from, a.to))
    }

    fn bfs(&self, start: ItemSet, dir: impl Fn(&Arc) -> (usize, usize)) -> ItemSet {
        let mut adj = vec![Vec::new(); self.items];
        for a in &self.arcs {
            let (x, y) = dir(a);
            adj[x].push(y);
        }
        let mut seen = start;
        let mut queue: VecDeque<usize> = start.iter().collect();
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen.contains(y) {
                    seen.insert(y);
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

/// One query per (i, e, f) with z_i(f) > 0 and z_i(e) < b(e).
pub fn build_exchange_graph<Q: ExchangeQuery>(
    query: &mut Q,
    supply: &[u32],
    bundles: &[Bundle],
    side: DemandSide,
) -> Result<ExchangeGraph> {
    let m = supply.len();
    let mut arcs = Vec::new();
    for (i, z) in bundles.iter().enumerate() {
        for e in 0..m {
            if z[e] >= supply[e] {
                continue;
            }
            for f in 0..m {
                if f != e && z[f] > 0 {
                    let weight = query.exchange_weight(i, z, e, f)?;
                    if weight > 0 {
                        arcs.push(Arc { from: e, to: f, buyer: i, weight });
                    }
                }
            }
        }
    }
    Ok(ExchangeGraph { items: m, side, arcs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandReport {
    pub kind: DemandKind,
    /// Empty when no such set exists.
    pub set: ItemSet,
    pub magnitude: i64,
    pub solution: SumSolution,
}

impl DemandReport {
    pub fn exists(&self) -> bool {
        !self.set.is_empty()
    }

    pub fn counters(&self) -> OracleCounters {
        self.solution.counters.oracle
    }
}

/// The inclusion-wise minimal set among those maximizing overdemandedness.
pub fn min_max_overdemanded(inst: &Instance, p: &PriceVector, opts: SolverOptions) -> Result<DemandReport> {
    min_max_set(inst, p, DemandKind::Overdemanded, opts)
}

/// The inclusion-wise minimal set among those maximizing underdemandedness.
pub fn min_max_underdemanded(inst: &Instance, p: &PriceVector, opts: SolverOptions) -> Result<DemandReport> {
    min_max_set(inst, p, DemandKind::Underdemanded, opts)
}

pub fn min_max_set(inst: &Instance, p: &PriceVector, kind: DemandKind, opts: SolverOptions) -> Result<DemandReport> {
    let side = kind.side();
    let mut solution = solve(inst, p, side, opts)?;
    let classes = classify_totals(&solution.totals(), inst.supply());
    let magnitude = match kind {
        DemandKind::Overdemanded => solution.bundles.iter().map(|z| z.size() as i64).sum::<i64>() - solution.value as i64,
        DemandKind::Underdemanded => inst.total_supply() as i64 - solution.value as i64,
    };
    let sources = match kind {
        DemandKind::Overdemanded => classes.oversold,
        DemandKind::Underdemanded => classes.undersold,
    };
    if sources.is_empty() {
        return Ok(DemandReport { kind, set: ItemSet::EMPTY, magnitude, solution });
    }
    let mut query = OracleQuery::new(inst, p, side, opts.checks);
    let graph = build_exchange_graph(&mut query, inst.supply(), &solution.bundles, side)?;
    solution.counters.oracle.exo_calls += query.counters.exo_calls;
    solution.counters.oracle.value_calls += query.counters.value_calls;
    let set = match kind {
        DemandKind::Overdemanded => graph.reaching(sources),
        DemandKind::Underdemanded => graph.reachable_from(sources),
    };
    if opts.checks {
        let closed = graph.arcs.iter().all(|a| match kind {
            DemandKind::Overdemanded => !(set.contains(a.to) && !set.contains(a.from)),
            DemandKind::Underdemanded => !(set.contains(a.from) && !set.contains(a.to)),
        });
        if !closed {
            return Err(invariant("reachable set is not closed in the exchange graph"));
        }
        if kind == DemandKind::Overdemanded && !set.intersection(classes.undersold).is_empty() {
            return Err(invariant("an undersold item reaches an oversold one"));
        }
    }
    Ok(DemandReport { kind, set, magnitude, solution })
}

/// Some allocation of minimal preferred bundles fits within the supply.
pub fn is_packing(inst: &Instance, p: &PriceVector) -> Result<bool> {
    Ok(!min_max_overdemanded(inst, p, SolverOptions::default())?.exists())
}

/// Some allocation of maximal preferred bundles uses up the supply.
pub fn is_covering(inst: &Instance, p: &PriceVector) -> Result<bool> {
    Ok(!min_max_underdemanded(inst, p, SolverOptions::default())?.exists())
}

/// Packing and covering at once; equivalent to Walrasian for strong gross substitutes.
pub fn is_walrasian(inst: &Instance, p: &PriceVector) -> Result<bool> {
    Ok(is_packing(inst, p)? && is_covering(inst, p)?)
}

/// L(p) = Σ_i V_i(p) + ⟨p, b⟩
pub fn lyapunov(inst: &Instance, p: &PriceVector) -> i64 {
    inst.valuations()
        .iter()
        .map(|v| indirect_utility(v, inst.supply(), p).value)
        .sum::<i64>()
        + p.dot(inst.supply())
}

/// od(S) by enumerating the minimal preferred bundles.
pub fn overdemandedness(inst: &Instance, p: &PriceVector, s: ItemSet, budget: &EnumerationBudget) -> Result<i64> {
    Ok(DemandProfile::new(inst, p, budget)?.overdemandedness(s))
}

/// ud(S) by enumerating the maximal preferred bundles.
pub fn underdemandedness(inst: &Instance, p: &PriceVector, s: ItemSet, budget: &EnumerationBudget) -> Result<i64> {
    Ok(DemandProfile::new(inst, p, budget)?.underdemandedness(s))
}
