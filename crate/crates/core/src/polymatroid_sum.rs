//! Push-relabel for the polymatroid sum problem over the buyers' demand sets.
//!
//! Given prices p and a side (minimal or maximal preferred bundles), find
//! z_i in each buyer's demand set maximizing Σ_e min(Σ_i z_i(e), b(e)).
//! Undersold items pull units out of lower-level items through exchanges
//! inside a single buyer's demand set; oversold items stay at level 0.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bruteforce::{DemandProfile, EnumerationBudget};
use crate::error::{invariant, Error, Result};
use crate::model::{classify_totals, exchange, Allocation, Bundle, Instance, ItemSet, PriceVector};
use crate::valuations::{BuyerOracle, DemandSide, OracleCounters};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    /// b ≡ 1: every sold item above level 0 has a single owner.
    UnitSupply,
    MultiSupply,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Re-verify the level invariants and oracle answers after every step.
    pub checks: bool,
    /// `None` picks unit supply whenever b ≡ 1.
    pub mode: Option<SolverMode>,
}

impl SolverOptions {
    pub fn checked() -> Self {
        SolverOptions { checks: true, mode: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverCounters {
    pub relabels: u64,
    pub saturating_pushes: u64,
    pub nonsaturating_pushes: u64,
    /// Largest number of pushes done from a single level.
    pub max_pushes_per_level: u64,
    pub oracle: OracleCounters,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumSolution {
    pub side: DemandSide,
    pub mode: SolverMode,
    pub bundles: Vec<Bundle>,
    pub levels: Vec<u32>,
    /// Items below the first empty level.
    pub certificate: ItemSet,
    /// Σ_e min(Σ_i z_i(e), b(e))
    pub value: u64,
    pub counters: SolverCounters,
}

impl SumSolution {
    pub fn allocation(&self) -> Allocation {
        Allocation::new(self.bundles.clone())
    }

    pub fn totals(&self) -> Vec<u32> {
        self.allocation().totals(self.levels.len())
    }
}

struct State<'a> {
    inst: &'a Instance,
    oracles: Vec<BuyerOracle<'a>>,
    z: Vec<Bundle>,
    totals: Vec<u32>,
    theta: Vec<u32>,
    /// Undersold items with level < m, bucketed by level.
    buckets: Vec<BTreeSet<usize>>,
    top: usize,
    ptr: Vec<usize>,
    counters: SolverCounters,
    pushes_at_level: Vec<u64>,
    /// Level of e at the time it entered buyer i's bundle (unit supply).
    added_at: Vec<Vec<u32>>,
    left_oversold: Vec<bool>,
    checks: bool,
    mode: SolverMode,
}

impl<'a> State<'a> {
    fn m(&self) -> usize {
        self.totals.len()
    }

    fn undersold(&self, e: usize) -> bool {
        self.totals[e] < self.inst.supply()[e]
    }

    fn refresh(&mut self, e: usize) {
        let m = self.m();
        let lvl = self.theta[e] as usize;
        if lvl < m {
            if self.undersold(e) {
                self.buckets[lvl].insert(e);
                self.top = self.top.max(lvl);
            } else {
                self.buckets[lvl].remove(&e);
            }
        }
    }

    fn select(&mut self) -> Option<usize> {
        loop {
            if let Some(&e) = self.buckets[self.top].first() {
                return Some(e);
            }
            if self.top == 0 {
                return None;
            }
            self.top -= 1;
        }
    }

    /// Exchange weight for (i, e, f) if the pair passes the cheap filters.
    fn eligible(&mut self, i: usize, e: usize, f: usize, counted: bool) -> Result<u32> {
        let lvl = self.theta[e];
        if f == e || lvl == 0 || self.theta[f] != lvl - 1 {
            return Ok(0);
        }
        if self.z[i][f] == 0 || self.z[i][e] == self.inst.supply()[e] {
            return Ok(0);
        }
        if counted {
            self.oracles[i].exchange_weight(&self.z[i], e, f, &mut self.counters.oracle)
        } else {
            let mut scratch = OracleCounters::default();
            self.oracles[i].exchange_weight(&self.z[i], e, f, &mut scratch)
        }
    }

    fn push(&mut self, i: usize, e: usize, f: usize, w: u32) -> Result<bool> {
        let deficit = self.inst.supply()[e] - self.totals[e];
        let alpha = deficit.min(w);
        if alpha == 0 {
            return Err(invariant("push with nothing to move"));
        }
        self.z[i] = exchange(&self.z[i], e, f, alpha, self.inst.supply())?;
        self.totals[e] += alpha;
        self.totals[f] -= alpha;
        let lvl = self.theta[e];
        self.pushes_at_level[lvl as usize] += 1;
        self.counters.max_pushes_per_level = self.counters.max_pushes_per_level.max(self.pushes_at_level[lvl as usize]);
        let saturating = alpha == w;
        if saturating {
            self.counters.saturating_pushes += 1;
        } else {
            self.counters.nonsaturating_pushes += 1;
        }
        let phi_before = self.checks.then(|| self.phi_all());
        self.added_at[i][e] = lvl;
        self.refresh(e);
        self.refresh(f);
        if let Some(before) = phi_before {
            if self.mode == SolverMode::UnitSupply {
                let after = self.phi_all();
                if before.iter().zip(&after).any(|(b, a)| a < b) || after[lvl as usize] <= before[lvl as usize] {
                    return Err(invariant(format!("level potential did not grow on push at level {lvl}")));
                }
            }
        }
        self.after_step()?;
        Ok(saturating)
    }

    fn relabel(&mut self, e: usize) -> Result<()> {
        if self.theta[e] as usize >= self.m() {
            return Err(invariant(format!("relabel of item {e} above the top level")));
        }
        if self.checks {
            for i in 0..self.z.len() {
                for f in 0..self.m() {
                    if self.eligible(i, e, f, false)? > 0 {
                        return Err(invariant(format!("relabel of item {e} with eligible pair ({i}, {f})")));
                    }
                }
            }
        }
        let phi_before = self.checks.then(|| self.phi_all());
        self.buckets[self.theta[e] as usize].remove(&e);
        self.theta[e] += 1;
        self.ptr[e] = 0;
        self.counters.relabels += 1;
        self.refresh(e);
        if let Some(before) = phi_before {
            if self.mode == SolverMode::UnitSupply && before != self.phi_all() {
                return Err(invariant("relabel changed the level potential"));
            }
        }
        self.after_step()
    }

    /// Φ(ℓ) = Σ_i |{e in z_i : added at level ≥ ℓ}|
    fn phi_all(&self) -> Vec<u64> {
        (0..=self.m() as u32)
            .map(|l| {
                (0..self.z.len())
                    .map(|i| (0..self.m()).filter(|&e| self.z[i][e] > 0 && self.added_at[i][e] >= l).count() as u64)
                    .sum()
            })
            .collect()
    }

    fn after_step(&mut self) -> Result<()> {
        let m = self.m();
        let supply = self.inst.supply();
        for e in 0..m {
            let over = self.totals[e] > supply[e];
            if self.left_oversold[e] && over {
                return Err(invariant(format!("item {e} became oversold again")));
            }
        }
        for e in 0..m {
            if self.totals[e] <= supply[e] {
                self.left_oversold[e] = true;
            }
        }
        if !self.checks {
            return Ok(());
        }
        let recomputed = Allocation::new(self.z.clone()).totals(m);
        if recomputed != self.totals {
            return Err(invariant("cached totals drifted"));
        }
        for e in 0..m {
            // L1
            if self.totals[e] > supply[e] && self.theta[e] != 0 {
                return Err(invariant(format!("oversold item {e} above level 0")));
            }
        }
        // L2: every positive exchange weight w_i(e, f) has Θ(f) ≥ Θ(e) − 1.
        let mut scratch = OracleCounters::default();
        for i in 0..self.z.len() {
            if !self.oracles[i].is_member(&self.z[i], &mut scratch) {
                return Err(Error::NotPreferredBundle { buyer: i, side: self.oracles[i].side().name() });
            }
            for e in 0..m {
                for f in 0..m {
                    if f != e
                        && self.theta[f] + 1 < self.theta[e]
                        && self.z[i][f] > 0
                        && self.z[i][e] < supply[e]
                        && self.oracles[i].exchange_weight(&self.z[i], e, f, &mut scratch)? > 0
                    {
                        return Err(invariant(format!("level gap on arc ({e}, {f}) of buyer {i}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Scans pairs k = i·m + f starting at the item's pointer.
    fn step_multi(&mut self, e: usize) -> Result<()> {
        let m = self.m();
        let n = self.z.len();
        if self.checks {
            for k in 0..self.ptr[e] {
                if self.eligible(k / m, e, k % m, false)? > 0 {
                    return Err(invariant(format!("pointer of item {e} skipped eligible pair {k}")));
                }
            }
        }
        let mut k = self.ptr[e];
        while k < n * m {
            let (i, f) = (k / m, k % m);
            let w = self.eligible(i, e, f, true)?;
            if w > 0 {
                if self.push(i, e, f, w)? {
                    self.ptr[e] = k + 1;
                    if !self.undersold(e) {
                        return Ok(());
                    }
                } else {
                    self.ptr[e] = k;
                    return Ok(());
                }
            }
            k += 1;
        }
        self.relabel(e)
    }

    fn step_unit(&mut self, e: usize) -> Result<()> {
        let lvl = self.theta[e];
        let n = self.z.len();
        let mut pairs = Vec::new();
        if lvl == 1 {
            for i in 0..n {
                pairs.extend((0..self.m()).filter(|&f| self.theta[f] == 0 && self.z[i][f] == 1).map(|f| (i, f)));
            }
        } else if lvl >= 2 {
            for f in (0..self.m()).filter(|&f| self.theta[f] == lvl - 1 && self.totals[f] == 1) {
                let owner = (0..n).find(|&i| self.z[i][f] == 1).expect("sold item has an owner");
                pairs.push((owner, f));
            }
        }
        for (i, f) in pairs {
            let w = self.eligible(i, e, f, true)?;
            if w > 0 {
                self.push(i, e, f, w)?;
                return Ok(());
            }
        }
        self.relabel(e)
    }
}

/// Solves the polymatroid sum problem at prices `p` on the given side.
pub fn solve(inst: &Instance, p: &PriceVector, side: DemandSide, opts: SolverOptions) -> Result<SumSolution> {
    let m = inst.items();
    let n = inst.buyer_count();
    if p.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: p.len() });
    }
    let mode = match opts.mode {
        Some(SolverMode::UnitSupply) if !inst.is_unit_supply() => return Err(Error::ModeMismatch),
        Some(mode) => mode,
        None if inst.is_unit_supply() => SolverMode::UnitSupply,
        None => SolverMode::MultiSupply,
    };
    let mut counters = SolverCounters::default();
    let oracles: Vec<BuyerOracle<'_>> =
        (0..n).map(|i| BuyerOracle::new(inst, i, p, side, opts.checks, &mut counters.oracle)).collect();
    let z: Vec<Bundle> = oracles.iter().map(|o| o.demand(&mut counters.oracle)).collect();
    let totals = Allocation::new(z.clone()).totals(m);
    let mut state = State {
        inst,
        oracles,
        z,
        totals,
        theta: vec![0; m],
        buckets: vec![BTreeSet::new(); m],
        top: 0,
        ptr: vec![0; m],
        counters,
        pushes_at_level: vec![0; m + 1],
        added_at: vec![vec![0; m]; n],
        left_oversold: vec![false; m],
        checks: opts.checks,
        mode,
    };
    for e in 0..m {
        state.refresh(e);
    }
    state.after_step()?;

    let (m64, n64) = (m as u64, n as u64);
    let guard = (m64 * m64 + m64) * (n64 * m64 + 1) + m64.pow(3) + 16;
    let mut steps = 0u64;
    while let Some(e) = state.select() {
        steps += 1;
        if steps > guard {
            return Err(invariant(format!("push-relabel exceeded {guard} steps")));
        }
        match mode {
            SolverMode::MultiSupply => state.step_multi(e)?,
            SolverMode::UnitSupply => state.step_unit(e)?,
        }
    }

    let c = &state.counters;
    if c.relabels > m64 * m64 {
        return Err(invariant(format!("{} relabels exceed m² = {}", c.relabels, m64 * m64)));
    }
    if c.nonsaturating_pushes > m64.pow(3) {
        return Err(invariant(format!("{} non-saturating pushes exceed m³", c.nonsaturating_pushes)));
    }
    if mode == SolverMode::UnitSupply && c.max_pushes_per_level > m64 {
        return Err(invariant(format!("{} pushes on one level exceed m", c.max_pushes_per_level)));
    }
    if c.oracle.do_calls != n64 {
        return Err(invariant("demand oracle must be queried once per buyer"));
    }

    let mut occupied = vec![false; m + 1];
    for &t in &state.theta {
        occupied[t as usize] = true;
    }
    let gap = occupied.iter().position(|&o| !o).expect("m items cannot fill m + 1 levels") as u32;
    let certificate: ItemSet = (0..m).filter(|&e| state.theta[e] < gap).collect();
    let value = state.totals.iter().zip(inst.supply()).map(|(&t, &b)| t.min(b) as u64).sum();
    Ok(SumSolution { side, mode, bundles: state.z, levels: state.theta, certificate, value, counters: state.counters })
}

/// Checks the optimality certificate of a solution by enumeration:
/// totals reach b on S, stay within b off S, and every z_i attains
/// ρ_i(E \ S) on its side.
pub fn check_certificate(
    inst: &Instance,
    p: &PriceVector,
    side: DemandSide,
    bundles: &[Bundle],
    s: ItemSet,
    budget: &EnumerationBudget,
) -> Result<bool> {
    let m = inst.items();
    let profile = DemandProfile::new(inst, p, budget)?;
    if bundles.len() != inst.buyer_count() {
        return Err(Error::LengthMismatch { expected: inst.buyer_count(), got: bundles.len() });
    }
    for (i, z) in bundles.iter().enumerate() {
        inst.check_bundle(z)?;
        if !profile.set(i, side).contains(z) {
            return Ok(false);
        }
    }
    let totals = Allocation::new(bundles.to_vec()).totals(m);
    let classes = classify_totals(&totals, inst.supply());
    let rest = s.complement(m);
    Ok(classes.undersold.intersection(s).is_empty()
        && classes.oversold.intersection(rest).is_empty()
        && bundles.iter().enumerate().all(|(i, z)| z.on(rest) == profile.rank(i, side, rest)))
}
