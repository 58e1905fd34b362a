//! Exhaustive reference computations for small markets.
//!
//! Nothing here calls the solver, the auctions or the greedy oracles: every
//! answer is derived from `Valuation::value` by enumeration.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::demand_sets::DemandKind;
use crate::error::{Error, Result};
use crate::model::{meet_join, BoxShape, Bundle, Instance, ItemSet, PriceVector};
use crate::valuations::{DemandSide, Valuation};

/// Caps on the sizes of the enumerations; exceeding one refuses the job.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    /// Points in the box [0, b].
    pub max_bundles: u64,
    /// Number of price values per item on the price grid.
    pub max_price: u64,
    /// Number of item subsets, 2^m.
    pub max_subsets: u64,
    /// Bundle tuples in the primal of the polymatroid sum.
    pub max_tuples: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_bundles: 4096, max_price: 16, max_subsets: 65536, max_tuples: 1 << 22 }
    }
}

impl EnumerationBudget {
    pub fn box_shape(&self, supply: &[u32]) -> Result<BoxShape> {
        let needed = BoxShape::count(supply).unwrap_or(u128::MAX);
        if needed > self.max_bundles as u128 {
            return Err(Error::EnumerationLimit { what: "bundles", needed, limit: self.max_bundles as u128 });
        }
        Ok(BoxShape::new(supply).expect("box fits the budget"))
    }

    pub fn check_subsets(&self, m: usize) -> Result<()> {
        let needed = 1u128 << m.min(127);
        if needed > self.max_subsets as u128 {
            return Err(Error::EnumerationLimit { what: "item subsets", needed, limit: self.max_subsets as u128 });
        }
        Ok(())
    }

    pub fn check_price_side(&self, side: u64) -> Result<()> {
        if side > self.max_price {
            return Err(Error::EnumerationLimit {
                what: "price grid side",
                needed: side as u128,
                limit: self.max_price as u128,
            });
        }
        Ok(())
    }
}

/// Every buyer's value on every point of the box.
#[derive(Clone, Debug)]
pub struct ValueTables {
    shape: BoxShape,
    points: Vec<Bundle>,
    values: Vec<Vec<i64>>,
}

impl ValueTables {
    pub fn new(inst: &Instance, budget: &EnumerationBudget) -> Result<Self> {
        let shape = budget.box_shape(inst.supply())?;
        let points: Vec<Bundle> = shape.points().collect();
        let values = inst
            .valuations()
            .iter()
            .map(|v| points.iter().map(|z| v.value(z)).collect())
            .collect();
        Ok(ValueTables { shape, points, values })
    }

    fn single(v: &Valuation, supply: &[u32], budget: &EnumerationBudget) -> Result<Self> {
        let shape = budget.box_shape(supply)?;
        let points: Vec<Bundle> = shape.points().collect();
        let values = vec![points.iter().map(|z| v.value(z)).collect()];
        Ok(ValueTables { shape, points, values })
    }

    pub fn shape(&self) -> &BoxShape {
        &self.shape
    }

    pub fn point(&self, k: usize) -> &Bundle {
        &self.points[k]
    }

    /// Indices of the utility-maximizing points of buyer `i` at `p`.
    pub fn preferred(&self, i: usize, p: &[i64]) -> Vec<usize> {
        let mut best = i64::MIN;
        let mut out = Vec::new();
        for (k, z) in self.points.iter().enumerate() {
            let u = self.values[i][k] - z.iter().zip(p).map(|(&q, &pe)| q as i64 * pe).sum::<i64>();
            if u > best {
                best = u;
                out.clear();
            }
            if u == best {
                out.push(k);
            }
        }
        out
    }

    /// Componentwise minimal or maximal members of a set of point indices.
    pub fn extremal(&self, set: &[usize], side: DemandSide) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&k| {
                !set.iter().any(|&j| {
                    j != k
                        && match side {
                            DemandSide::Minimal => self.points[j].leq(&self.points[k]),
                            DemandSide::Maximal => self.points[k].leq(&self.points[j]),
                        }
                })
            })
            .collect()
    }

    /// Members of a set of minimum or maximum size.
    pub fn by_cardinality(&self, set: &[usize], side: DemandSide) -> Vec<usize> {
        let sizes = set.iter().map(|&k| self.points[k].size());
        let target = match side {
            DemandSide::Minimal => sizes.min(),
            DemandSide::Maximal => sizes.max(),
        };
        set.iter().copied().filter(|&k| Some(self.points[k].size()) == target).collect()
    }
}

/// The whole preferred set D(p) of one valuation.
pub fn enumerate_preferred(v: &Valuation, supply: &[u32], p: &PriceVector, budget: &EnumerationBudget) -> Result<Vec<Bundle>> {
    let t = ValueTables::single(v, supply, budget)?;
    Ok(t.preferred(0, p.as_slice()).into_iter().map(|k| t.points[k].clone()).collect())
}

/// Componentwise minimal or maximal preferred bundles.
pub fn enumerate_demand(
    v: &Valuation,
    supply: &[u32],
    p: &PriceVector,
    side: DemandSide,
    budget: &EnumerationBudget,
) -> Result<Vec<Bundle>> {
    let t = ValueTables::single(v, supply, budget)?;
    let all = t.preferred(0, p.as_slice());
    Ok(t.extremal(&all, side).into_iter().map(|k| t.points[k].clone()).collect())
}

/// Whether the componentwise and the cardinality definitions of the minimal
/// and maximal preferred bundles coincide at `p`.
pub fn demand_definitions_agree(v: &Valuation, supply: &[u32], p: &PriceVector, budget: &EnumerationBudget) -> Result<bool> {
    let t = ValueTables::single(v, supply, budget)?;
    let all = t.preferred(0, p.as_slice());
    Ok([DemandSide::Minimal, DemandSide::Maximal].into_iter().all(|side| {
        let mut a = t.extremal(&all, side);
        let mut b = t.by_cardinality(&all, side);
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }))
}

/// Enumerated minimal and maximal preferred bundles of all buyers at one price.
#[derive(Clone, Debug)]
pub struct DemandProfile {
    m: usize,
    supply: Vec<u32>,
    minimal: Vec<Vec<Bundle>>,
    maximal: Vec<Vec<Bundle>>,
}

impl DemandProfile {
    pub fn new(inst: &Instance, p: &PriceVector, budget: &EnumerationBudget) -> Result<Self> {
        Self::from_tables(&ValueTables::new(inst, budget)?, inst, p)
    }

    pub fn from_tables(t: &ValueTables, inst: &Instance, p: &PriceVector) -> Result<Self> {
        let mut minimal = Vec::new();
        let mut maximal = Vec::new();
        for i in 0..inst.buyer_count() {
            let all = t.preferred(i, p.as_slice());
            minimal.push(t.extremal(&all, DemandSide::Minimal).into_iter().map(|k| t.points[k].clone()).collect());
            maximal.push(t.extremal(&all, DemandSide::Maximal).into_iter().map(|k| t.points[k].clone()).collect());
        }
        Ok(DemandProfile { m: inst.items(), supply: inst.supply().to_vec(), minimal, maximal })
    }

    pub fn set(&self, i: usize, side: DemandSide) -> &[Bundle] {
        match side {
            DemandSide::Minimal => &self.minimal[i],
            DemandSide::Maximal => &self.maximal[i],
        }
    }

    pub fn buyers(&self) -> usize {
        self.minimal.len()
    }

    /// ρ_i(S) on the chosen side.
    pub fn rank(&self, i: usize, side: DemandSide, s: ItemSet) -> u64 {
        self.set(i, side).iter().map(|z| z.on(s)).max().unwrap_or(0)
    }

    /// θ̌_i(S) = ρ̌_i(E) − ρ̌_i(E \ S)
    pub fn theta(&self, i: usize, s: ItemSet) -> u64 {
        let full = ItemSet::full(self.m);
        self.rank(i, DemandSide::Minimal, full) - self.rank(i, DemandSide::Minimal, full.difference(s))
    }

    fn supply_on(&self, s: ItemSet) -> i64 {
        s.iter().map(|e| self.supply[e] as i64).sum()
    }

    /// od(S) = Σ_i θ̌_i(S) − b(S)
    pub fn overdemandedness(&self, s: ItemSet) -> i64 {
        (0..self.buyers()).map(|i| self.theta(i, s) as i64).sum::<i64>() - self.supply_on(s)
    }

    /// ud(S) = b(S) − Σ_i ρ̂_i(S)
    pub fn underdemandedness(&self, s: ItemSet) -> i64 {
        self.supply_on(s) - (0..self.buyers()).map(|i| self.rank(i, DemandSide::Maximal, s) as i64).sum::<i64>()
    }

    pub fn magnitude(&self, kind: DemandKind, s: ItemSet) -> i64 {
        match kind {
            DemandKind::Overdemanded => self.overdemandedness(s),
            DemandKind::Underdemanded => self.underdemandedness(s),
        }
    }
}

/// Both sides of the polymatroid-sum min-max relation, by enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteSum {
    /// max over bundle tuples of Σ_e min(Σ_i z_i(e), b(e))
    pub primal: u64,
    pub witness: Vec<Bundle>,
    /// min over S of Σ_i ρ_i(E \ S) + b(S)
    pub dual: u64,
    pub dual_set: ItemSet,
}

pub fn brute_polymatroid_sum(inst: &Instance, p: &PriceVector, side: DemandSide, budget: &EnumerationBudget) -> Result<BruteSum> {
    budget.check_subsets(inst.items())?;
    let profile = DemandProfile::new(inst, p, budget)?;
    brute_polymatroid_sum_from(&profile, side, budget)
}

pub fn brute_polymatroid_sum_from(profile: &DemandProfile, side: DemandSide, budget: &EnumerationBudget) -> Result<BruteSum> {
    let n = profile.buyers();
    let m = profile.m;
    let tuples = (0..n).try_fold(1u128, |acc, i| acc.checked_mul(profile.set(i, side).len() as u128));
    let tuples = tuples.unwrap_or(u128::MAX);
    if tuples > budget.max_tuples as u128 {
        return Err(Error::EnumerationLimit { what: "bundle tuples", needed: tuples, limit: budget.max_tuples as u128 });
    }
    let supply = &profile.supply;
    let mut best = (0u64, Vec::new());
    let mut choice = vec![0usize; n];
    loop {
        let mut t = vec![0u32; m];
        for (i, &c) in choice.iter().enumerate() {
            for (te, q) in t.iter_mut().zip(profile.set(i, side)[c].iter()) {
                *te += q;
            }
        }
        let val: u64 = t.iter().zip(supply).map(|(&te, &be)| te.min(be) as u64).sum();
        if best.1.is_empty() || val > best.0 {
            best = (val, choice.iter().enumerate().map(|(i, &c)| profile.set(i, side)[c].clone()).collect());
        }
        let mut i = 0;
        while i < n {
            choice[i] += 1;
            if choice[i] < profile.set(i, side).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let full = ItemSet::full(m);
    let mut dual = (u64::MAX, ItemSet::EMPTY);
    for s in ItemSet::all_subsets(m) {
        let val: u64 = (0..n).map(|i| profile.rank(i, side, full.difference(s))).sum::<u64>()
            + s.iter().map(|e| supply[e] as u64).sum::<u64>();
        if val < dual.0 {
            dual = (val, s);
        }
    }
    Ok(BruteSum { primal: best.0, witness: best.1, dual: dual.0, dual_set: dual.1 })
}

/// The intersection of all sets maximizing od (or ud), with the maximum.
pub fn brute_min_max_set(inst: &Instance, p: &PriceVector, kind: DemandKind, budget: &EnumerationBudget) -> Result<(ItemSet, i64)> {
    budget.check_subsets(inst.items())?;
    let profile = DemandProfile::new(inst, p, budget)?;
    Ok(min_max_set_from(&profile, kind))
}

pub fn min_max_set_from(profile: &DemandProfile, kind: DemandKind) -> (ItemSet, i64) {
    let mut best = i64::MIN;
    let mut meet = ItemSet::full(profile.m);
    for s in ItemSet::all_subsets(profile.m) {
        let val = profile.magnitude(kind, s);
        if val > best {
            best = val;
            meet = s;
        } else if val == best {
            meet = meet.intersection(s);
        }
    }
    (meet, best)
}

/// Sets attaining the maximum of od (or ud).
pub fn argmax_sets(profile: &DemandProfile, kind: DemandKind) -> Vec<ItemSet> {
    let vals: Vec<(ItemSet, i64)> = ItemSet::all_subsets(profile.m).map(|s| (s, profile.magnitude(kind, s))).collect();
    let best = vals.iter().map(|v| v.1).max().unwrap_or(0);
    vals.into_iter().filter(|v| v.1 == best).map(|v| v.0).collect()
}

/// Packing, covering and Walrasian status of every price on the grid.
#[derive(Clone, Debug)]
pub struct GridAnalysis {
    pub side: u64,
    pub points: Vec<GridPoint>,
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub prices: PriceVector,
    pub packing: bool,
    pub covering: bool,
    pub walrasian: bool,
}

/// Walrasian prices on the grid [0, max_i v_i(b)]^m with their extremes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalrasianSet {
    pub prices: Vec<PriceVector>,
    pub minimal: Option<PriceVector>,
    pub maximal: Option<PriceVector>,
    /// Closed under meet and join.
    pub is_lattice: bool,
}

struct Searcher<'a> {
    tables: &'a ValueTables,
    supply: &'a [u32],
}

impl Searcher<'_> {
    fn add(&self, acc: &mut [u32], k: usize, sign: i32) {
        for (a, &q) in acc.iter_mut().zip(self.tables.points[k].iter()) {
            if sign > 0 {
                *a += q;
            } else {
                *a -= q;
            }
        }
    }

    /// A tuple from `sets` with totals exactly equal to the supply.
    fn exact(&self, sets: &[Vec<usize>], last: &[bool]) -> Option<Vec<usize>> {
        let mut acc = vec![0u32; self.supply.len()];
        let mut chosen = Vec::with_capacity(sets.len());
        self.exact_rec(sets, last, 0, &mut acc, &mut chosen).then_some(chosen)
    }

    fn exact_rec(&self, sets: &[Vec<usize>], last: &[bool], i: usize, acc: &mut Vec<u32>, chosen: &mut Vec<usize>) -> bool {
        if i + 1 == sets.len() {
            let need: Vec<u32> = self.supply.iter().zip(acc.iter()).map(|(b, a)| b - a).collect();
            let k = self.tables.shape.index(&need);
            if last[k] {
                chosen.push(k);
                return true;
            }
            return false;
        }
        for &k in &sets[i] {
            self.add(acc, k, 1);
            if acc.iter().zip(self.supply).all(|(a, b)| a <= b) {
                chosen.push(k);
                if self.exact_rec(sets, last, i + 1, acc, chosen) {
                    return true;
                }
                chosen.pop();
            }
            self.add(acc, k, -1);
        }
        false
    }

    fn packing(&self, sets: &[Vec<usize>], i: usize, acc: &mut Vec<u32>) -> bool {
        if i == sets.len() {
            return true;
        }
        for &k in &sets[i] {
            self.add(acc, k, 1);
            let ok = acc.iter().zip(self.supply).all(|(a, b)| a <= b) && self.packing(sets, i + 1, acc);
            self.add(acc, k, -1);
            if ok {
                return true;
            }
        }
        false
    }

    fn covering(&self, sets: &[Vec<usize>], i: usize, acc: &mut Vec<u32>) -> bool {
        if i == sets.len() {
            return acc.iter().zip(self.supply).all(|(a, b)| a >= b);
        }
        for &k in &sets[i] {
            self.add(acc, k, 1);
            let ok = self.covering(sets, i + 1, acc);
            self.add(acc, k, -1);
            if ok {
                return true;
            }
        }
        false
    }
}

fn grid_side(inst: &Instance, budget: &EnumerationBudget) -> Result<u64> {
    let side = inst.max_full_value().max(0) as u64 + 1;
    budget.check_price_side(side)?;
    Ok(side)
}

/// Visits every grid price; items with zero supply keep price 0.
fn for_each_grid_price(inst: &Instance, side: u64, mut f: impl FnMut(&[i64])) {
    let m = inst.items();
    let live: Vec<usize> = (0..m).filter(|&e| inst.supply()[e] > 0).collect();
    let mut p = vec![0i64; m];
    loop {
        f(&p);
        let mut j = 0;
        while j < live.len() {
            let e = live[j];
            p[e] += 1;
            if (p[e] as u64) < side {
                break;
            }
            p[e] = 0;
            j += 1;
        }
        if j == live.len() {
            return;
        }
    }
}

fn preferred_sets(tables: &ValueTables, n: usize, p: &[i64]) -> Vec<Vec<usize>> {
    (0..n).map(|i| tables.preferred(i, p)).collect()
}

/// Searches every grid price for an allocation selling exactly the supply.
pub fn brute_walrasian(inst: &Instance, budget: &EnumerationBudget) -> Result<WalrasianSet> {
    let tables = ValueTables::new(inst, budget)?;
    brute_walrasian_with(inst, &tables, budget)
}

pub fn brute_walrasian_with(inst: &Instance, tables: &ValueTables, budget: &EnumerationBudget) -> Result<WalrasianSet> {
    let side = grid_side(inst, budget)?;
    let searcher = Searcher { tables, supply: inst.supply() };
    let n = inst.buyer_count();
    let mut found = Vec::new();
    for_each_grid_price(inst, side, |p| {
        let mut sets = preferred_sets(tables, n, p);
        sets.sort_by_key(|s| s.len());
        let mut last = vec![false; tables.shape.len()];
        for &k in sets.last().expect("at least one buyer") {
            last[k] = true;
        }
        if searcher.exact(&sets, &last).is_some() {
            found.push(PriceVector::new(p.to_vec()).expect("grid prices are nonnegative"));
        }
    });
    Ok(summarize(found))
}

fn summarize(prices: Vec<PriceVector>) -> WalrasianSet {
    let mut minimal: Option<PriceVector> = None;
    let mut maximal: Option<PriceVector> = None;
    for p in &prices {
        minimal = Some(match minimal {
            None => p.clone(),
            Some(q) => meet_join(&q, p).expect("same length").0,
        });
        maximal = Some(match maximal {
            None => p.clone(),
            Some(q) => meet_join(&q, p).expect("same length").1,
        });
    }
    let members: HashSet<&PriceVector> = prices.iter().collect();
    let is_lattice = prices.iter().all(|p| {
        prices.iter().all(|q| {
            let (a, b) = meet_join(p, q).expect("same length");
            members.contains(&a) && members.contains(&b)
        })
    });
    WalrasianSet { prices, minimal, maximal, is_lattice }
}

/// Packing, covering and Walrasian flags for every grid price.
pub fn analyze_grid(inst: &Instance, budget: &EnumerationBudget) -> Result<GridAnalysis> {
    let tables = ValueTables::new(inst, budget)?;
    let side = grid_side(inst, budget)?;
    let searcher = Searcher { tables: &tables, supply: inst.supply() };
    let n = inst.buyer_count();
    let mut points = Vec::new();
    for_each_grid_price(inst, side, |p| {
        let all = preferred_sets(&tables, n, p);
        let minimal: Vec<Vec<usize>> = all.iter().map(|s| tables.extremal(s, DemandSide::Minimal)).collect();
        let maximal: Vec<Vec<usize>> = all.iter().map(|s| tables.extremal(s, DemandSide::Maximal)).collect();
        let mut acc = vec![0u32; inst.items()];
        let packing = searcher.packing(&minimal, 0, &mut acc);
        let covering = searcher.covering(&maximal, 0, &mut acc);
        let walrasian = packing && covering && {
            let mut sets = all.clone();
            sets.sort_by_key(|s| s.len());
            let mut last = vec![false; tables.shape.len()];
            for &k in sets.last().expect("at least one buyer") {
                last[k] = true;
            }
            searcher.exact(&sets, &last).is_some()
        };
        points.push(GridPoint { prices: PriceVector::new(p.to_vec()).expect("nonnegative"), packing, covering, walrasian });
    });
    Ok(GridAnalysis { side, points })
}

impl GridAnalysis {
    pub fn walrasian(&self) -> WalrasianSet {
        summarize(self.points.iter().filter(|g| g.walrasian).map(|g| g.prices.clone()).collect())
    }
}

/// Whether buyer tuples at `p` can pack, cover, or exactly sell the supply.
pub fn brute_price_status(inst: &Instance, p: &PriceVector, budget: &EnumerationBudget) -> Result<GridPoint> {
    let tables = ValueTables::new(inst, budget)?;
    let searcher = Searcher { tables: &tables, supply: inst.supply() };
    let all = preferred_sets(&tables, inst.buyer_count(), p.as_slice());
    let minimal: Vec<Vec<usize>> = all.iter().map(|s| tables.extremal(s, DemandSide::Minimal)).collect();
    let maximal: Vec<Vec<usize>> = all.iter().map(|s| tables.extremal(s, DemandSide::Maximal)).collect();
    let mut acc = vec![0u32; inst.items()];
    let packing = searcher.packing(&minimal, 0, &mut acc);
    let covering = searcher.covering(&maximal, 0, &mut acc);
    let mut sets = all;
    sets.sort_by_key(|s| s.len());
    let mut last = vec![false; tables.shape.len()];
    for &k in sets.last().expect("at least one buyer") {
        last[k] = true;
    }
    let walrasian = searcher.exact(&sets, &last).is_some();
    Ok(GridPoint { prices: p.clone(), packing, covering, walrasian })
}

/// Outcome of comparing grid prices with the Walrasian extremes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub holds: bool,
    pub checked: usize,
    pub violations: Vec<PriceVector>,
}

/// Every packing grid price is at least the minimal Walrasian price.
pub fn check_packing_extremes(inst: &Instance, budget: &EnumerationBudget) -> Result<ExtremesReport> {
    Ok(packing_extremes_from(&analyze_grid(inst, budget)?))
}

/// Every covering grid price is at most the maximal Walrasian price.
pub fn check_covering_extremes(inst: &Instance, budget: &EnumerationBudget) -> Result<ExtremesReport> {
    Ok(covering_extremes_from(&analyze_grid(inst, budget)?))
}

pub fn packing_extremes_from(grid: &GridAnalysis) -> ExtremesReport {
    let w = grid.walrasian();
    let pts: Vec<&GridPoint> = grid.points.iter().filter(|g| g.packing).collect();
    let violations: Vec<PriceVector> = match &w.minimal {
        Some(lo) => pts.iter().filter(|g| !lo.leq(&g.prices)).map(|g| g.prices.clone()).collect(),
        None => pts.iter().map(|g| g.prices.clone()).collect(),
    };
    ExtremesReport { holds: violations.is_empty(), checked: pts.len(), violations }
}

pub fn covering_extremes_from(grid: &GridAnalysis) -> ExtremesReport {
    let w = grid.walrasian();
    let pts: Vec<&GridPoint> = grid.points.iter().filter(|g| g.covering).collect();
    let violations: Vec<PriceVector> = match &w.maximal {
        Some(hi) => pts.iter().filter(|g| !g.prices.leq(hi)).map(|g| g.prices.clone()).collect(),
        None => pts.iter().map(|g| g.prices.clone()).collect(),
    };
    ExtremesReport { holds: violations.is_empty(), checked: pts.len(), violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// One unit less of item `item`.
    SupplyDecrease { item: usize },
    /// Buyer `buyer` may take one unit less in total.
    DemandDecrease { buyer: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityVerdict {
    pub perturbation: Perturbation,
    pub before: Option<(PriceVector, PriceVector)>,
    pub after: Option<(PriceVector, PriceVector)>,
    /// Items whose prices are compared.
    pub compared: ItemSet,
    pub holds: bool,
}

/// Compares the Walrasian extremes before and after a one-unit perturbation.
///
/// Less supply must weakly raise both extremes on the items still supplied;
/// a smaller demand cap must weakly lower both.
pub fn monotonicity_harness(inst: &Instance, perturbation: Perturbation, budget: &EnumerationBudget) -> Result<MonotonicityVerdict> {
    let before = brute_walrasian(inst, budget)?;
    monotonicity_from(inst, &before, perturbation, budget)
}

pub fn monotonicity_from(
    inst: &Instance,
    before: &WalrasianSet,
    perturbation: Perturbation,
    budget: &EnumerationBudget,
) -> Result<MonotonicityVerdict> {
    let m = inst.items();
    let (changed, compared) = match perturbation {
        Perturbation::SupplyDecrease { item } => {
            if item >= m {
                return Err(Error::InvalidInstance(format!("no item {item}")));
            }
            let mut b = inst.supply().to_vec();
            b[item] = b[item]
                .checked_sub(1)
                .ok_or_else(|| Error::InvalidInstance(format!("item {item} has no supply left")))?;
            let compared = (0..m).filter(|&e| b[e] > 0).collect();
            (inst.with_supply(b)?, compared)
        }
        Perturbation::DemandDecrease { buyer } => {
            if buyer >= inst.buyer_count() {
                return Err(Error::InvalidInstance(format!("no buyer {buyer}")));
            }
            let cap = inst
                .demand_cap(buyer)
                .checked_sub(1)
                .ok_or_else(|| Error::InvalidInstance(format!("buyer {buyer} has a zero demand cap")))?;
            (inst.with_demand_cap(buyer, cap)?, ItemSet::full(m))
        }
    };
    let after = brute_walrasian(&changed, budget)?;
    let pair = |w: &WalrasianSet| w.minimal.clone().zip(w.maximal.clone());
    let (b, a) = (pair(before), pair(&after));
    let holds = match (&b, &a) {
        (Some((lo0, hi0)), Some((lo1, hi1))) => compared.iter().all(|e| match perturbation {
            Perturbation::SupplyDecrease { .. } => lo0[e] <= lo1[e] && hi0[e] <= hi1[e],
            Perturbation::DemandDecrease { .. } => lo1[e] <= lo0[e] && hi1[e] <= hi0[e],
        }),
        _ => false,
    };
    Ok(MonotonicityVerdict { perturbation, before: b, after: a, compared, holds })
}
