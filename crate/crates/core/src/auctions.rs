//! Ascending, descending, two-phase and greedy auctions on the price lattice.
//!
//! Every round moves prices by ±χ_S for the inclusion-wise minimal set S
//! maximizing over- or underdemandedness.

use serde::{Deserialize, Serialize};

use crate::demand_sets::{lyapunov, min_max_set, DemandKind, DemandReport};
use crate::error::{invariant, Error, Result};
use crate::model::{Allocation, Bundle, Instance, ItemSet, PriceVector};
use crate::polymatroid_sum::{solve, SolverCounters, SolverOptions};
use crate::valuations::{indirect_utility, DemandSide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuctionMode {
    Ascending,
    Descending,
    TwoPhase,
    Greedy,
}

impl AuctionMode {
    pub fn name(self) -> &'static str {
        match self {
            AuctionMode::Ascending => "ascending",
            AuctionMode::Descending => "descending",
            AuctionMode::TwoPhase => "two-phase",
            AuctionMode::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for AuctionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascending" => Ok(AuctionMode::Ascending),
            "descending" => Ok(AuctionMode::Descending),
            "two-phase" | "two_phase" => Ok(AuctionMode::TwoPhase),
            "greedy" => Ok(AuctionMode::Greedy),
            other => Err(Error::InvalidInstance(format!("unknown auction mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionOptions {
    pub solver: SolverOptions,
    /// Defaults to 4·n·m·(max_i v_i(b) + 1).
    pub round_limit: Option<usize>,
}

impl AuctionOptions {
    pub fn checked() -> Self {
        AuctionOptions { solver: SolverOptions::checked(), round_limit: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounters {
    #[serde(rename = "do")]
    pub do_calls: u64,
    #[serde(rename = "exo")]
    pub exo_calls: u64,
    pub pushes_sat: u64,
    pub pushes_nonsat: u64,
    pub relabels: u64,
    pub solver_runs: u64,
}

impl RunCounters {
    fn absorb(&mut self, c: &SolverCounters) {
        self.do_calls += c.oracle.do_calls;
        self.exo_calls += c.oracle.exo_calls;
        self.pushes_sat += c.saturating_pushes;
        self.pushes_nonsat += c.nonsaturating_pushes;
        self.relabels += c.relabels;
        self.solver_runs += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub index: usize,
    /// +1 raises prices on `set`, −1 lowers them.
    pub direction: i8,
    pub set: ItemSet,
    pub magnitude: i64,
    pub lyapunov_before: i64,
    pub lyapunov_after: i64,
    pub counters: RunCounters,
    pub prices: PriceVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionTrace {
    pub mode: AuctionMode,
    pub start: PriceVector,
    pub rounds: Vec<Round>,
    pub final_prices: PriceVector,
    pub walrasian: bool,
    pub allocation: Allocation,
    pub counters: RunCounters,
}

pub fn default_round_limit(inst: &Instance) -> usize {
    4 * inst.buyer_count() * inst.items() * (inst.max_full_value().max(0) as usize + 1)
}

/// Uniform max_i v_i(b) + 1: no buyer wants anything at these prices.
pub fn descending_start(inst: &Instance) -> PriceVector {
    PriceVector::uniform(inst.items(), inst.max_full_value() + 1)
}

struct Driver<'a> {
    inst: &'a Instance,
    opts: AuctionOptions,
    limit: usize,
    prices: PriceVector,
    rounds: Vec<Round>,
    counters: RunCounters,
}

impl<'a> Driver<'a> {
    fn new(inst: &'a Instance, start: PriceVector, opts: AuctionOptions) -> Result<Self> {
        if start.len() != inst.items() {
            return Err(Error::LengthMismatch { expected: inst.items(), got: start.len() });
        }
        let limit = opts.round_limit.unwrap_or_else(|| default_round_limit(inst));
        Ok(Driver { inst, opts, limit, prices: start, rounds: Vec::new(), counters: RunCounters::default() })
    }

    fn query(&mut self, kind: DemandKind) -> Result<DemandReport> {
        let report = min_max_set(self.inst, &self.prices, kind, self.opts.solver)?;
        self.counters.absorb(&report.solution.counters);
        Ok(report)
    }

    fn step(&mut self, report: &DemandReport) -> Result<()> {
        if self.rounds.len() >= self.limit {
            return Err(Error::RoundLimitExceeded {
                rounds: self.rounds.len(),
                prices: self.prices.clone(),
                reason: "round limit reached".into(),
            });
        }
        let before = lyapunov(self.inst, &self.prices);
        let (direction, next) = match report.kind {
            DemandKind::Overdemanded => (1, self.prices.raised(report.set)),
            DemandKind::Underdemanded => (-1, self.prices.lowered(report.set)?),
        };
        let after = lyapunov(self.inst, &next);
        if self.opts.solver.checks && after >= before {
            return Err(invariant(format!("Lyapunov function did not decrease: {before} -> {after}")));
        }
        self.prices = next;
        self.rounds.push(Round {
            index: self.rounds.len(),
            direction,
            set: report.set,
            magnitude: report.magnitude,
            lyapunov_before: before,
            lyapunov_after: after,
            counters: self.counters,
            prices: self.prices.clone(),
        });
        Ok(())
    }

    fn stalled(&self, what: &str) -> Error {
        Error::RoundLimitExceeded {
            rounds: self.rounds.len(),
            prices: self.prices.clone(),
            reason: format!("stalled: {what}"),
        }
    }

    fn finish(self, mode: AuctionMode, start: PriceVector) -> Result<(PriceVector, AuctionTrace)> {
        let mut counters = self.counters;
        let allocation = extract_allocation_counted(self.inst, &self.prices, self.opts.solver, &mut counters)?;
        let trace = AuctionTrace {
            mode,
            start,
            rounds: self.rounds,
            final_prices: self.prices.clone(),
            walrasian: true,
            allocation,
            counters,
        };
        Ok((self.prices, trace))
    }
}

/// Raises prices on minimal maximal overdemanded sets until none is left.
/// Starting at or below the minimal Walrasian prices, ends exactly there.
pub fn ascending(inst: &Instance, start: PriceVector, opts: AuctionOptions) -> Result<(PriceVector, AuctionTrace)> {
    let mut d = Driver::new(inst, start.clone(), opts)?;
    loop {
        let od = d.query(DemandKind::Overdemanded)?;
        if od.exists() {
            d.step(&od)?;
            continue;
        }
        if d.query(DemandKind::Underdemanded)?.exists() {
            return Err(d.stalled("no overdemanded set but an underdemanded set remains"));
        }
        return d.finish(AuctionMode::Ascending, start);
    }
}

/// Lowers prices on minimal maximal underdemanded sets until none is left.
/// Starting at or above the maximal Walrasian prices, ends exactly there.
pub fn descending(inst: &Instance, start: PriceVector, opts: AuctionOptions) -> Result<(PriceVector, AuctionTrace)> {
    let mut d = Driver::new(inst, start.clone(), opts)?;
    loop {
        let ud = d.query(DemandKind::Underdemanded)?;
        if ud.exists() {
            d.step(&ud)?;
            continue;
        }
        if d.query(DemandKind::Overdemanded)?.exists() {
            return Err(d.stalled("no underdemanded set but an overdemanded set remains"));
        }
        return d.finish(AuctionMode::Descending, start);
    }
}

/// Ascending phase, then descending phase, from any start.
pub fn two_phase(inst: &Instance, start: PriceVector, opts: AuctionOptions) -> Result<(PriceVector, AuctionTrace)> {
    let mut d = Driver::new(inst, start.clone(), opts)?;
    loop {
        let od = d.query(DemandKind::Overdemanded)?;
        if !od.exists() {
            break;
        }
        d.step(&od)?;
    }
    loop {
        let ud = d.query(DemandKind::Underdemanded)?;
        if !ud.exists() {
            break;
        }
        d.step(&ud)?;
    }
    if d.query(DemandKind::Overdemanded)?.exists() {
        return Err(d.stalled("overdemanded set reappeared after the descending phase"));
    }
    d.finish(AuctionMode::TwoPhase, start)
}

/// Each round follows whichever of the two sets has the larger magnitude;
/// ties raise prices.
pub fn greedy(inst: &Instance, start: PriceVector, opts: AuctionOptions) -> Result<(PriceVector, AuctionTrace)> {
    let mut d = Driver::new(inst, start.clone(), opts)?;
    loop {
        let od = d.query(DemandKind::Overdemanded)?;
        let ud = d.query(DemandKind::Underdemanded)?;
        if !od.exists() && !ud.exists() {
            return d.finish(AuctionMode::Greedy, start);
        }
        if od.exists() && od.magnitude >= ud.magnitude {
            d.step(&od)?;
        } else {
            d.step(&ud)?;
        }
    }
}

pub fn run(inst: &Instance, mode: AuctionMode, start: PriceVector, opts: AuctionOptions) -> Result<(PriceVector, AuctionTrace)> {
    match mode {
        AuctionMode::Ascending => ascending(inst, start, opts),
        AuctionMode::Descending => descending(inst, start, opts),
        AuctionMode::TwoPhase => two_phase(inst, start, opts),
        AuctionMode::Greedy => greedy(inst, start, opts),
    }
}

/// The usual start of each auction: zero for ascending, greedy and two-phase,
/// above every value for descending.
pub fn default_start(inst: &Instance, mode: AuctionMode) -> PriceVector {
    match mode {
        AuctionMode::Descending => descending_start(inst),
        _ => PriceVector::zeros(inst.items()),
    }
}

/// An allocation of preferred bundles that sells the supply exactly.
///
/// Starts from a packing allocation of minimal bundles and moves it toward
/// a covering allocation of maximal bundles one unit at a time, adding an
/// undersold item to some buyer who holds less of it than in the covering
/// allocation, possibly giving up one unit of another item.
pub fn extract_allocation(inst: &Instance, p: &PriceVector, opts: SolverOptions) -> Result<Allocation> {
    extract_allocation_counted(inst, p, opts, &mut RunCounters::default())
}

fn extract_allocation_counted(inst: &Instance, p: &PriceVector, opts: SolverOptions, counters: &mut RunCounters) -> Result<Allocation> {
    let m = inst.items();
    let supply = inst.supply();
    let packing = solve(inst, p, DemandSide::Minimal, opts)?;
    counters.absorb(&packing.counters);
    let covering = solve(inst, p, DemandSide::Maximal, opts)?;
    counters.absorb(&covering.counters);
    let mut y = packing.bundles.clone();
    let z = covering.bundles;
    let ty = packing.totals();
    let tz = Allocation::new(z.clone()).totals(m);
    if (0..m).any(|e| ty[e] > supply[e] || tz[e] < supply[e]) {
        return Err(Error::NotWalrasian(p.clone()));
    }
    let utilities: Vec<i64> = inst.valuations().iter().map(|v| indirect_utility(v, supply, p).value).collect();
    let preferred = |i: usize, x: &Bundle| inst.valuation(i).value(x) - p.dot(x) == utilities[i];
    let distance = |y: &[Bundle]| -> u64 {
        y.iter().zip(&z).map(|(a, b)| a.iter().zip(b.iter()).map(|(&s, &t)| s.abs_diff(t) as u64).sum::<u64>()).sum()
    };
    let mut totals = ty;
    while let Some(e) = (0..m).find(|&e| totals[e] < supply[e]) {
        let before = distance(&y);
        let mut moved = false;
        'buyers: for j in (0..y.len()).filter(|&j| y[j][e] < z[j][e]) {
            let mut cand = y[j].clone();
            cand[e] += 1;
            if preferred(j, &cand) {
                y[j] = cand;
                totals[e] += 1;
                moved = true;
                break;
            }
            for f in (0..m).filter(|&f| f != e && y[j][f] > z[j][f]) {
                cand[f] -= 1;
                if preferred(j, &cand) {
                    y[j] = cand;
                    totals[e] += 1;
                    totals[f] -= 1;
                    moved = true;
                    break 'buyers;
                }
                cand[f] += 1;
            }
        }
        if !moved {
            return Err(Error::NotWalrasian(p.clone()));
        }
        if distance(&y) >= before {
            return Err(invariant("allocation repair did not approach the covering allocation"));
        }
    }
    if totals != supply || (0..y.len()).any(|i| !preferred(i, &y[i])) {
        return Err(invariant("repaired allocation is not Walrasian"));
    }
    Ok(Allocation::new(y))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub consistent: bool,
    /// Index of the first round whose recomputation differs.
    pub first_divergence: Option<usize>,
    pub detail: Option<String>,
}

/// Re-executes a trace from its start and compares every round.
pub fn replay(inst: &Instance, trace: &AuctionTrace, opts: AuctionOptions) -> Result<ReplayReport> {
    let limit = trace.rounds.len() + 1;
    let redo = run(inst, trace.mode, trace.start.clone(), AuctionOptions { round_limit: Some(limit), ..opts });
    let fresh = match redo {
        Ok((_, t)) => t,
        Err(Error::RoundLimitExceeded { .. }) => {
            let idx = trace.rounds.len();
            return Ok(ReplayReport {
                consistent: false,
                first_divergence: Some(idx),
                detail: Some("recorded trace stops before the auction ends".into()),
            });
        }
        Err(err) => return Err(err),
    };
    let n = trace.rounds.len().max(fresh.rounds.len());
    for k in 0..n {
        match (trace.rounds.get(k), fresh.rounds.get(k)) {
            (Some(a), Some(b)) if a.direction == b.direction && a.set == b.set && a.prices == b.prices => {}
            (a, b) => {
                let detail = match (a, b) {
                    (Some(a), Some(b)) => format!(
                        "recorded {}{:?} to {}, recomputed {}{:?} to {}",
                        sign(a.direction),
                        a.set,
                        a.prices,
                        sign(b.direction),
                        b.set,
                        b.prices
                    ),
                    (Some(_), None) => "recorded round has no counterpart".into(),
                    _ => "recomputation continues past the recorded rounds".into(),
                };
                return Ok(ReplayReport { consistent: false, first_divergence: Some(k), detail: Some(detail) });
            }
        }
    }
    if fresh.final_prices != trace.final_prices {
        return Ok(ReplayReport {
            consistent: false,
            first_divergence: Some(n),
            detail: Some(format!("final prices {} differ from recorded {}", fresh.final_prices, trace.final_prices)),
        });
    }
    Ok(ReplayReport { consistent: true, first_divergence: None, detail: None })
}

fn sign(d: i8) -> char {
    if d > 0 {
        '+'
    } else {
        '-'
    }
}

/// Sum of per-round demand-oracle calls: n per solver run.
pub fn expected_do_calls(inst: &Instance, counters: &RunCounters) -> u64 {
    inst.buyer_count() as u64 * counters.solver_runs
}
