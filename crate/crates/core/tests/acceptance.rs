//! End-to-end acceptance run: one line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use walras::auctions::{
    ascending, default_start, descending, greedy, two_phase, AuctionOptions, AuctionTrace, RunCounters,
};
use walras::bruteforce::{
    analyze_grid, brute_polymatroid_sum_from, brute_price_status, brute_walrasian, covering_extremes_from,
    min_max_set_from, monotonicity_from, packing_extremes_from, DemandProfile, EnumerationBudget, GridAnalysis,
    Perturbation, ValueTables, WalrasianSet,
};
use walras::cli::bench_rows;
use walras::demand_sets::{build_exchange_graph, is_covering, lyapunov, min_max_overdemanded, min_max_set, DemandKind};
use walras::fixtures;
use walras::generate::{corpus, Family, Prng};
use walras::model::{Instance, ItemSet, PriceVector};
use walras::polymatroid_sum::{solve, SolverMode, SolverOptions, SumSolution};
use walras::valuations::{check_m_convex, check_mnat_concave, copy_to_unit_supply, DemandSide};

const CORPUS_SEED: u64 = 20240917;
const CORPUS_SIZE: usize = 200;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pv(v: &[i64]) -> PriceVector {
    PriceVector::new(v.to_vec()).unwrap()
}

struct Case {
    inst: Instance,
    grid: GridAnalysis,
    walrasian: WalrasianSet,
    lo: PriceVector,
    hi: PriceVector,
    probes: Vec<PriceVector>,
    starts: Vec<PriceVector>,
}

fn prepare(seed: u64) -> Result<Vec<Case>, String> {
    let budget = EnumerationBudget::default();
    let mut rng = Prng::new(seed ^ 0x5eed);
    corpus(seed, CORPUS_SIZE)
        .into_iter()
        .enumerate()
        .map(|(k, inst)| {
            let grid = analyze_grid(&inst, &budget).map_err(err)?;
            let walrasian = grid.walrasian();
            let (lo, hi) = match (&walrasian.minimal, &walrasian.maximal) {
                (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
                _ => return Err(format!("corpus instance {k} has no Walrasian prices")),
            };
            let side = grid.side as u32;
            let mut random = |n: usize| -> Vec<PriceVector> {
                (0..n)
                    .map(|_| pv(&(0..inst.items()).map(|_| rng.below(side) as i64).collect::<Vec<_>>()))
                    .collect()
            };
            let mut probes = vec![PriceVector::zeros(inst.items()), lo.clone(), hi.clone()];
            probes.extend(random(3));
            let starts = random(2);
            Ok(Case { inst, grid, walrasian, lo, hi, probes, starts })
        })
        .collect()
}

fn counters_ok(sol: &SumSolution, inst: &Instance) -> Result<(), String> {
    let m = inst.items() as u64;
    let c = &sol.counters;
    ensure(c.nonsaturating_pushes <= m.pow(3), || format!("{} non-saturating pushes > m³", c.nonsaturating_pushes))?;
    ensure(c.relabels <= m * m, || format!("{} relabels > m²", c.relabels))?;
    ensure(c.oracle.do_calls == inst.buyer_count() as u64, || format!("{} demand calls", c.oracle.do_calls))?;
    if sol.mode == SolverMode::UnitSupply {
        ensure(c.max_pushes_per_level <= m, || format!("{} pushes on one level", c.max_pushes_per_level))?;
    }
    Ok(())
}

fn trace_ok(inst: &Instance, trace: &AuctionTrace) -> Result<(), String> {
    let c: RunCounters = trace.counters;
    ensure(c.do_calls == inst.buyer_count() as u64 * c.solver_runs, || "demand calls do not reconcile".into())?;
    ensure(trace.rounds.windows(2).all(|w| w[0].lyapunov_after == w[1].lyapunov_before), || "round chain broken".into())?;
    ensure(trace.rounds.iter().all(|r| r.lyapunov_after < r.lyapunov_before), || "Lyapunov not decreasing".into())?;
    ensure(trace.allocation.totals(inst.items()) == inst.supply(), || "allocation does not clear the market".into())?;
    for (i, z) in trace.allocation.bundles.iter().enumerate() {
        let best = best_utility(inst, i, &trace.final_prices);
        let u = inst.valuation(i).value(z) - trace.final_prices.dot(z);
        ensure(u == best, || format!("buyer {i} does not get a preferred bundle"))?;
    }
    Ok(())
}

/// max_z v_i(z) − ⟨p, z⟩ by enumeration.
fn best_utility(inst: &Instance, i: usize, p: &PriceVector) -> i64 {
    let t = ValueTables::new(inst, &EnumerationBudget::default()).unwrap();
    let k = t.preferred(i, p.as_slice())[0];
    inst.valuation(i).value(t.point(k)) - p.dot(t.point(k))
}

fn criterion_1() -> Outcome {
    let inst = fixtures::six_items();
    let alloc = fixtures::six_items_allocation();
    let mut reported = fixtures::six_items_reported_weights();
    let graph = build_exchange_graph(&mut reported, inst.supply(), &alloc, DemandSide::Minimal).map_err(err)?;
    ensure(graph.arc_pairs() == fixtures::SIX_ITEMS_ARCS, || format!("arcs {:?}", graph.arc_pairs()))?;
    let oversold: ItemSet = [0, 1].into_iter().collect();
    let reach = graph.reaching(oversold);
    let expect: ItemSet = [0, 1, 2, 3].into_iter().collect();
    ensure(reach == expect, || format!("reported graph reaches {reach:?}"))?;
    let report = min_max_overdemanded(&inst, &PriceVector::zeros(6), SolverOptions::checked()).map_err(err)?;
    ensure(report.set == expect, || format!("solver set {:?}", report.set))?;
    Ok(format!("9 arcs, overdemanded set {:?} with od = {}", report.set, report.magnitude))
}

fn criterion_2() -> Outcome {
    let cases = [
        (fixtures::three_buyers_base(), [0, 1, 1]),
        (fixtures::three_buyers_lowered(), [0, 0, 0]),
        (fixtures::three_buyers_lowered_twice(), [0, 1, 1]),
    ];
    let mut got = Vec::new();
    for (inst, want) in cases {
        let (p, _) = ascending(&inst, PriceVector::zeros(3), AuctionOptions::checked()).map_err(err)?;
        ensure(p.as_slice() == want, || format!("got {p}, want {want:?}"))?;
        got.push(p.to_string());
    }
    Ok(got.join(" "))
}

fn criterion_3() -> Outcome {
    let mut got = Vec::new();
    for (k, (_, want)) in fixtures::UNIT_DEMAND_ROWS.iter().enumerate() {
        let inst = fixtures::unit_demand_row(k);
        let (p, _) = descending(&inst, default_start(&inst, walras::auctions::AuctionMode::Descending), AuctionOptions::checked())
            .map_err(err)?;
        ensure(p.as_slice() == want, || format!("row {k}: got {p}, want {want:?}"))?;
        got.push(p.to_string());
    }
    Ok(got.join(" "))
}

fn criterion_4() -> Outcome {
    let inst = fixtures::no_equilibrium();
    let w = brute_walrasian(&inst, &EnumerationBudget::default()).map_err(err)?;
    ensure(w.prices.is_empty(), || format!("{} Walrasian grid prices", w.prices.len()))?;
    match ascending(&inst, PriceVector::zeros(3), AuctionOptions::default()) {
        Err(walras::Error::RoundLimitExceeded { rounds, prices, .. }) => {
            Ok(format!("empty Walrasian set; ascending gave up after {rounds} rounds at {prices}"))
        }
        other => Err(format!("ascending returned {other:?}")),
    }
}

fn criterion_5() -> Outcome {
    let inst = fixtures::covering_not_lattice();
    let budget = EnumerationBudget { max_price: 19, ..Default::default() };
    let a = brute_price_status(&inst, &pv(&[6, 7, 7]), &budget).map_err(err)?;
    let b = brute_price_status(&inst, &pv(&[7, 7, 7]), &budget).map_err(err)?;
    ensure(a.covering, || "(6, 7, 7) not covering".into())?;
    ensure(!b.covering, || "(7, 7, 7) covering".into())?;
    let w = brute_walrasian(&inst, &budget).map_err(err)?;
    ensure(w.maximal == Some(pv(&[7, 7, 8])), || format!("maximal Walrasian {:?}", w.maximal))?;
    let solver_a = is_covering(&inst, &pv(&[6, 7, 7])).map_err(err)?;
    let solver_b = is_covering(&inst, &pv(&[7, 7, 7])).map_err(err)?;
    Ok(format!(
        "covering (6,7,7)=true (7,7,7)=false, p* = (7, 7, 8); solver-based predicate on this non-SGS market: {solver_a}/{solver_b}"
    ))
}

fn criterion_6(cases: &[Case]) -> Outcome {
    let budget = EnumerationBudget::default();
    let opts = SolverOptions::checked();
    let mut sums = 0;
    let mut sets = 0;
    let mut auctions = 0;
    for (k, c) in cases.iter().enumerate() {
        let inst = &c.inst;
        let tables = ValueTables::new(inst, &budget).map_err(err)?;
        for p in &c.probes {
            let profile = DemandProfile::from_tables(&tables, inst, p).map_err(err)?;
            for side in [DemandSide::Minimal, DemandSide::Maximal] {
                let sol = solve(inst, p, side, opts).map_err(err)?;
                let brute = brute_polymatroid_sum_from(&profile, side, &budget).map_err(err)?;
                ensure(sol.value == brute.primal && brute.primal == brute.dual, || {
                    format!("instance {k} at {p} {}: solver {} primal {} dual {}", side.name(), sol.value, brute.primal, brute.dual)
                })?;
                sums += 1;
            }
            for kind in [DemandKind::Overdemanded, DemandKind::Underdemanded] {
                let report = min_max_set(inst, p, kind, opts).map_err(err)?;
                let (set, mag) = min_max_set_from(&profile, kind);
                let expect = if mag > 0 { set } else { ItemSet::EMPTY };
                ensure(report.set == expect && report.magnitude == mag, || {
                    format!("instance {k} at {p} {kind:?}: bfs {:?}/{} brute {:?}/{mag}", report.set, report.magnitude, expect)
                })?;
                sets += 1;
            }
        }
        let (asc, _) = ascending(inst, PriceVector::zeros(inst.items()), AuctionOptions::checked()).map_err(err)?;
        ensure(asc == c.lo, || format!("instance {k}: ascending {asc} vs {}", c.lo))?;
        let (desc, _) = descending(inst, default_start(inst, walras::auctions::AuctionMode::Descending), AuctionOptions::checked())
            .map_err(err)?;
        ensure(desc == c.hi, || format!("instance {k}: descending {desc} vs {}", c.hi))?;
        for s in &c.starts {
            let (tp, _) = two_phase(inst, s.clone(), AuctionOptions::checked()).map_err(err)?;
            ensure(c.walrasian.prices.contains(&tp), || format!("instance {k}: two-phase {tp} not Walrasian"))?;
            let (gr, _) = greedy(inst, s.clone(), AuctionOptions::checked()).map_err(err)?;
            ensure(c.walrasian.prices.contains(&gr), || format!("instance {k}: greedy {gr} not Walrasian"))?;
        }
        auctions += 2 + 2 * c.starts.len();
    }
    Ok(format!("{} instances: {sums} sums, {sets} sets, {auctions} auctions agree", cases.len()))
}

fn criterion_7(cases: &[Case]) -> Outcome {
    let mut runs = 0;
    for (k, c) in cases.iter().enumerate() {
        for p in &c.probes {
            for side in [DemandSide::Minimal, DemandSide::Maximal] {
                let sol = solve(&c.inst, p, side, SolverOptions::checked()).map_err(err)?;
                counters_ok(&sol, &c.inst).map_err(|e| format!("instance {k}: {e}"))?;
                runs += 1;
            }
        }
        for start in &c.starts {
            let (_, trace) = greedy(&c.inst, start.clone(), AuctionOptions::default()).map_err(err)?;
            trace_ok(&c.inst, &trace).map_err(|e| format!("instance {k}: {e}"))?;
        }
    }
    let mut sweep = 0;
    let mut worst = (0.0f64, 0.0f64);
    for (family, b) in [(Family::Oxs, 2), (Family::MatroidRank, 2), (Family::Oxs, 1), (Family::UnitDemand, 1)] {
        for seed in 0..3 {
            for row in bench_rows(family, 4, 12, 3, b, seed).map_err(err)? {
                let m = row.m as u64;
                ensure(row.pushes_nonsat <= m.pow(3), || format!("sweep m={m}: {} non-saturating pushes", row.pushes_nonsat))?;
                ensure(row.do_calls == row.n as u64, || format!("sweep m={m}: {} demand calls", row.do_calls))?;
                worst.0 = worst.0.max(row.ratio_multi);
                if b == 1 {
                    worst.1 = worst.1.max(row.ratio_unit);
                }
                sweep += 1;
            }
        }
    }
    Ok(format!(
        "{runs} corpus runs and {sweep} sweep runs within bounds; max exo/(n·m³) = {:.3}, unit max exo/(m³+n·m²) = {:.3}",
        worst.0, worst.1
    ))
}

fn criterion_8(cases: &[Case]) -> Outcome {
    let budget = EnumerationBudget::default();
    let mut checked_runs = 0;
    let mut convex_sets = 0;
    let mut identities = 0;
    for (k, c) in cases.iter().enumerate() {
        let inst = &c.inst;
        for (i, v) in inst.valuations().iter().enumerate() {
            ensure(check_mnat_concave(v, inst.supply(), &budget).map_err(err)?, || {
                format!("instance {k} buyer {i} ({}) is not M♮-concave", v.family())
            })?;
        }
        let tables = ValueTables::new(inst, &budget).map_err(err)?;
        for p in &c.probes {
            for side in [DemandSide::Minimal, DemandSide::Maximal] {
                solve(inst, p, side, SolverOptions::checked()).map_err(|e| format!("instance {k} at {p}: {e}"))?;
                checked_runs += 1;
            }
            let profile = DemandProfile::from_tables(&tables, inst, p).map_err(err)?;
            for i in 0..inst.buyer_count() {
                for side in [DemandSide::Minimal, DemandSide::Maximal] {
                    ensure(check_m_convex(profile.set(i, side)), || {
                        format!("instance {k} buyer {i} {} demand set at {p} is not M-convex", side.name())
                    })?;
                    convex_sets += 1;
                }
            }
            let base = lyapunov(inst, p);
            for s in ItemSet::all_subsets(inst.items()) {
                let up = lyapunov(inst, &p.raised(s)) - base;
                ensure(up == -profile.overdemandedness(s), || format!("instance {k} at {p}: L(p+χ_S) identity fails for {s:?}"))?;
                identities += 1;
                if let Ok(q) = p.lowered(s) {
                    let down = lyapunov(inst, &q) - base;
                    ensure(down == -profile.underdemandedness(s), || {
                        format!("instance {k} at {p}: L(p−χ_S) identity fails for {s:?}")
                    })?;
                    identities += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked_runs} checked solver runs, {convex_sets} M-convex demand sets, {identities} Lyapunov identities"
    ))
}

fn criterion_9(cases: &[Case]) -> Outcome {
    let mut points = 0;
    for (k, c) in cases.iter().enumerate() {
        let pack = packing_extremes_from(&c.grid);
        let cover = covering_extremes_from(&c.grid);
        ensure(pack.holds, || format!("instance {k}: packing prices below p_*: {:?}", pack.violations))?;
        ensure(cover.holds, || format!("instance {k}: covering prices above p*: {:?}", cover.violations))?;
        ensure(c.walrasian.is_lattice, || format!("instance {k}: Walrasian set not a lattice"))?;
        points += c.grid.points.len();
    }
    Ok(format!("{points} grid prices checked, zero violations"))
}

fn criterion_10(cases: &[Case]) -> Outcome {
    let budget = EnumerationBudget::default();
    let mut verdicts = 0;
    for (k, c) in cases.iter().enumerate() {
        let inst = &c.inst;
        let mut perts: Vec<Perturbation> = (0..inst.items()).map(|item| Perturbation::SupplyDecrease { item }).collect();
        perts.extend((0..inst.buyer_count()).map(|buyer| Perturbation::DemandDecrease { buyer }));
        for pert in perts {
            let v = monotonicity_from(inst, &c.walrasian, pert, &budget).map_err(err)?;
            ensure(v.holds, || format!("instance {k} {pert:?}: {:?} -> {:?}", v.before, v.after))?;
            verdicts += 1;
        }
    }
    Ok(format!("{verdicts} perturbations, zero violations"))
}

fn criterion_11(cases: &[Case]) -> Outcome {
    let budget = EnumerationBudget::default();
    let mut checked = 0;
    for (k, c) in cases.iter().enumerate() {
        let inst = &c.inst;
        if inst.is_unit_supply() || inst.total_supply() > 6 {
            continue;
        }
        let (copied, proj) = copy_to_unit_supply(inst).map_err(err)?;
        let w = brute_walrasian(&copied, &budget).map_err(err)?;
        let (lo, hi) = w.minimal.zip(w.maximal).ok_or_else(|| format!("instance {k}: copied market has no Walrasian prices"))?;
        for (copy, &e) in proj.iter().enumerate() {
            ensure(lo[copy] == c.lo[e] && hi[copy] == c.hi[e], || {
                format!("instance {k}: copy {copy} of item {e} priced {}/{} vs {}/{}", lo[copy], hi[copy], c.lo[e], c.hi[e])
            })?;
        }
        checked += 1;
    }
    ensure(checked > 0, || "no multi-supply instances".into())?;
    Ok(format!("{checked} multi-supply markets: copy prices are constant on fibers and match"))
}

fn main() {
    let mut results: Vec<(usize, Outcome, Duration)> = Vec::new();
    let mut timed = |n: usize, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let d = t.elapsed();
        let (tag, msg) = match &r {
            Ok(m) => ("PASS", m.clone()),
            Err(m) => ("FAIL", m.clone()),
        };
        println!("criterion {n:>2}: {tag} ({:.2}s) {msg}", d.as_secs_f64());
        results.push((n, r, d));
    };
    timed(1, &criterion_1);
    timed(2, &criterion_2);
    timed(3, &criterion_3);
    timed(4, &criterion_4);
    timed(5, &criterion_5);
    let t = Instant::now();
    let cases = prepare(CORPUS_SEED);
    println!("corpus: {CORPUS_SIZE} markets analysed in {:.2}s", t.elapsed().as_secs_f64());
    match cases {
        Ok(cases) => {
            timed(6, &|| criterion_6(&cases));
            timed(7, &|| criterion_7(&cases));
            timed(8, &|| criterion_8(&cases));
            timed(9, &|| criterion_9(&cases));
            timed(10, &|| criterion_10(&cases));
            timed(11, &|| criterion_11(&cases));
        }
        Err(e) => {
            for n in 6..=11 {
                timed(n, &|| Err(format!("corpus preparation failed: {e}")));
            }
        }
    }
    let failed: Vec<usize> = results.iter().filter(|r| r.1.is_err()).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
