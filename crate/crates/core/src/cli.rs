//! The `walras` command line: gen, solve, verify and bench.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::auctions::{ascending, default_start, descending, replay, run, AuctionMode, AuctionOptions};
use crate::bruteforce::{
    brute_min_max_set, brute_polymatroid_sum, brute_walrasian, monotonicity_from, EnumerationBudget, Perturbation,
};
use crate::demand_sets::{min_max_set, DemandKind};
use crate::error::{Error, Result};
use crate::formats::{InstanceFile, TraceFile};
use crate::generate::{generate, Family, GenParams, Prng};
use crate::model::{Instance, PriceVector};
use crate::polymatroid_sum::{check_certificate, solve, SolverOptions};
use crate::valuations::DemandSide;

#[derive(Parser, Debug)]
#[command(name = "walras", version, about = "Walrasian prices for strong gross substitutes markets")]
pub struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance file.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long = "B", default_value_t = 1)]
        max_supply: u32,
        #[arg(long, default_value_t = 6)]
        value_cap: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an auction on an instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Ascending)]
        mode: ModeArg,
        /// Comma-separated start prices.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Re-verify solver invariants at every step.
        #[arg(long)]
        checks: bool,
    },
    /// Cross-check the solver against exhaustive enumeration.
    Verify {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        /// Also replay a recorded trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Oracle-call counts over a size sweep, as CSV.
    Bench {
        #[arg(long, default_value = "mixed")]
        family: String,
        #[arg(long, default_value_t = 4)]
        m_min: usize,
        #[arg(long, default_value_t = 12)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long = "B", default_value_t = 2)]
        max_supply: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Ascending,
    Descending,
    TwoPhase,
    Greedy,
}

impl From<ModeArg> for AuctionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ascending => AuctionMode::Ascending,
            ModeArg::Descending => AuctionMode::Descending,
            ModeArg::TwoPhase => AuctionMode::TwoPhase,
            ModeArg::Greedy => AuctionMode::Greedy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    All,
    Sum,
    Sets,
    Walrasian,
    Monotonicity,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::RoundLimitExceeded { .. } => 2,
        Error::EnumerationLimit { .. } => 3,
        _ => 1,
    }
}

pub fn execute(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Gen { family, m, n, max_supply, value_cap, seed, out } => {
            let params = GenParams {
                family: family.parse()?,
                items: *m,
                buyers: *n,
                max_supply: *max_supply,
                value_cap: *value_cap,
                seed: *seed,
            };
            let file = InstanceFile::from_instance(&generate(&params)?);
            let text = file.to_json();
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Solve { instance, mode, start, trace_out, checks } => {
            cmd_solve(cli.json, instance, (*mode).into(), start.as_deref(), trace_out.as_ref(), *checks)
        }
        Command::Verify { instance, scope, trace } => cmd_verify(cli.json, instance, *scope, trace.as_ref()),
        Command::Bench { family, m_min, m_max, n, max_supply, seed } => {
            cmd_bench(family.parse()?, *m_min, *m_max, *n, *max_supply, *seed)
        }
    }
}

pub fn parse_prices(s: &str) -> Result<PriceVector> {
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::InvalidInstance(format!("bad price `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    PriceVector::new(values)
}

#[derive(Serialize)]
struct SolveOutput {
    mode: AuctionMode,
    prices: PriceVector,
    walrasian: bool,
    rounds: usize,
    minimality_guaranteed: Option<bool>,
    counters: crate::auctions::RunCounters,
}

fn cmd_solve(
    json: bool,
    path: &PathBuf,
    mode: AuctionMode,
    start: Option<&str>,
    trace_out: Option<&PathBuf>,
    checks: bool,
) -> Result<u8> {
    let file = InstanceFile::load(path)?;
    let inst = file.to_instance()?;
    let start = match start {
        Some(s) => parse_prices(s)?,
        None => default_start(&inst, mode),
    };
    if start.len() != inst.items() {
        return Err(Error::LengthMismatch { expected: inst.items(), got: start.len() });
    }
    let mut minimality = None;
    if mode == AuctionMode::Ascending {
        let from_zero = start.as_slice().iter().all(|&x| x == 0);
        if !from_zero {
            eprintln!("warning: ascending start {start} is not zero; the result is minimal only if the start is below the minimal Walrasian prices");
        }
        minimality = Some(from_zero);
    }
    let opts = AuctionOptions { solver: SolverOptions { checks, mode: None }, round_limit: None };
    let (prices, trace) = run(&inst, mode, start, opts)?;
    if let Some(out) = trace_out {
        std::fs::write(out, TraceFile::new(&file, &trace).to_json() + "\n")?;
    }
    if json {
        let out = SolveOutput {
            mode,
            prices,
            walrasian: trace.walrasian,
            rounds: trace.rounds.len(),
            minimality_guaranteed: minimality,
            counters: trace.counters,
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("{prices}");
        let c = trace.counters;
        println!(
            "rounds {}  do {}  exo {}  pushes {}/{}  relabels {}",
            trace.rounds.len(),
            c.do_calls,
            c.exo_calls,
            c.pushes_sat,
            c.pushes_nonsat,
            c.relabels
        );
    }
    Ok(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub digest: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

fn check(checks: &mut Vec<Check>, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
    checks.push(Check { name: name.into(), pass, detail: detail.into() });
}

/// Price points for the sum and set checks: zero, all ones, and half the top value.
fn probe_prices(inst: &Instance) -> Vec<PriceVector> {
    let m = inst.items();
    let mut ps = vec![PriceVector::zeros(m), PriceVector::uniform(m, 1), PriceVector::uniform(m, inst.max_full_value() / 2)];
    ps.dedup();
    ps
}

/// Runs the cross-checks of `scope` on one instance.
pub fn verify_instance(inst: &Instance, scope: Scope, budget: &EnumerationBudget) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let opts = SolverOptions::checked();
    let wants = |s: Scope| scope == Scope::All || scope == s;
    if wants(Scope::Sum) {
        for p in probe_prices(inst) {
            for side in [DemandSide::Minimal, DemandSide::Maximal] {
                let sol = solve(inst, &p, side, opts)?;
                let brute = brute_polymatroid_sum(inst, &p, side, budget)?;
                let cert = check_certificate(inst, &p, side, &sol.bundles, sol.certificate, budget)?;
                check(
                    &mut checks,
                    format!("sum {} at {p}", side.name()),
                    sol.value == brute.primal && brute.primal == brute.dual && cert,
                    format!("solver {} primal {} dual {} certificate {cert}", sol.value, brute.primal, brute.dual),
                );
            }
        }
    }
    if wants(Scope::Sets) {
        for p in probe_prices(inst) {
            for kind in [DemandKind::Overdemanded, DemandKind::Underdemanded] {
                let report = min_max_set(inst, &p, kind, opts)?;
                let (set, magnitude) = brute_min_max_set(inst, &p, kind, budget)?;
                let expect = if magnitude > 0 { set } else { Default::default() };
                check(
                    &mut checks,
                    format!("{kind:?} set at {p}").to_lowercase(),
                    report.set == expect && report.magnitude == magnitude.max(0),
                    format!("bfs {:?} ({}) brute {:?} ({magnitude})", report.set, report.magnitude, expect),
                );
            }
        }
    }
    let needs_walrasian = wants(Scope::Walrasian) || wants(Scope::Monotonicity);
    let walrasian = if needs_walrasian { Some(brute_walrasian(inst, budget)?) } else { None };
    if wants(Scope::Walrasian) {
        let w = walrasian.as_ref().expect("computed above");
        match (&w.minimal, &w.maximal) {
            (Some(lo), Some(hi)) => {
                let asc = ascending(inst, PriceVector::zeros(inst.items()), AuctionOptions::checked());
                let desc = descending(inst, default_start(inst, AuctionMode::Descending), AuctionOptions::checked());
                let asc_ok = matches!(&asc, Ok((p, _)) if p == lo);
                let desc_ok = matches!(&desc, Ok((p, _)) if p == hi);
                check(&mut checks, "ascending reaches the minimal Walrasian prices", asc_ok, format!("brute {lo}"));
                check(&mut checks, "descending reaches the maximal Walrasian prices", desc_ok, format!("brute {hi}"));
                check(&mut checks, "Walrasian prices form a lattice", w.is_lattice, format!("{} grid points", w.prices.len()));
            }
            _ => {
                let asc = ascending(inst, PriceVector::zeros(inst.items()), AuctionOptions::default());
                check(
                    &mut checks,
                    "no Walrasian prices and the ascending auction gives up",
                    matches!(asc, Err(Error::RoundLimitExceeded { .. })),
                    "empty Walrasian set",
                );
            }
        }
    }
    if wants(Scope::Monotonicity) {
        let w = walrasian.as_ref().expect("computed above");
        let mut perturbations: Vec<Perturbation> =
            (0..inst.items()).map(|item| Perturbation::SupplyDecrease { item }).collect();
        perturbations.extend(
            (0..inst.buyer_count()).filter(|&b| inst.demand_cap(b) > 0).map(|buyer| Perturbation::DemandDecrease { buyer }),
        );
        for pert in perturbations {
            let v = monotonicity_from(inst, w, pert, budget)?;
            check(&mut checks, format!("monotone under {pert:?}"), v.holds, format!("{:?} -> {:?}", v.before, v.after));
        }
    }
    Ok(checks)
}

fn cmd_verify(json: bool, path: &PathBuf, scope: Scope, trace: Option<&PathBuf>) -> Result<u8> {
    let file = InstanceFile::load(path)?;
    let inst = file.to_instance()?;
    let mut checks = verify_instance(&inst, scope, &EnumerationBudget::default())?;
    if let Some(tpath) = trace {
        let tf = TraceFile::from_json(&std::fs::read_to_string(tpath)?)?;
        check(&mut checks, "trace digest matches the instance", tf.instance_digest == file.digest(), tf.instance_digest.clone());
        let report = replay(&inst, &tf.to_trace(), AuctionOptions::default())?;
        let detail = match (report.first_divergence, &report.detail) {
            (Some(k), Some(d)) => format!("first divergent round {k}: {d}"),
            _ => "all rounds reproduced".into(),
        };
        check(&mut checks, "trace replay", report.consistent, detail);
    }
    let verdict = Verdict { digest: file.digest(), pass: checks.iter().all(|c| c.pass), checks };
    if json {
        println!("{}", serde_json::to_string_pretty(&verdict)?);
    } else {
        for c in &verdict.checks {
            println!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
    }
    Ok(if verdict.pass { 0 } else { 1 })
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub m: usize,
    pub n: usize,
    pub max_supply: u32,
    pub do_calls: u64,
    pub exo_calls: u64,
    pub pushes_sat: u64,
    pub pushes_nonsat: u64,
    pub relabels: u64,
    pub micros: u128,
    /// exo / (n·m³)
    pub ratio_multi: f64,
    /// exo / (m³ + n·m²)
    pub ratio_unit: f64,
}

/// One solver run per size at random prices, minimal side.
pub fn bench_rows(family: Family, m_min: usize, m_max: usize, n: usize, max_supply: u32, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for m in m_min..=m_max {
        let params = GenParams { family, items: m, buyers: n, max_supply, value_cap: 4 * m as i64, seed: seed + m as u64 };
        let inst = generate(&params)?;
        let mut rng = Prng::new(seed ^ (m as u64) << 32);
        let top = inst.max_full_value().max(0) as u32;
        let p = PriceVector::new((0..m).map(|_| rng.range(0, top / 2) as i64).collect())?;
        let t0 = Instant::now();
        let sol = solve(&inst, &p, DemandSide::Minimal, SolverOptions::default())?;
        let micros = t0.elapsed().as_micros();
        let c = sol.counters;
        let (mf, nf) = (m as f64, n as f64);
        rows.push(BenchRow {
            m,
            n,
            max_supply,
            do_calls: c.oracle.do_calls,
            exo_calls: c.oracle.exo_calls,
            pushes_sat: c.saturating_pushes,
            pushes_nonsat: c.nonsaturating_pushes,
            relabels: c.relabels,
            micros,
            ratio_multi: c.oracle.exo_calls as f64 / (nf * mf.powi(3)),
            ratio_unit: c.oracle.exo_calls as f64 / (mf.powi(3) + nf * mf * mf),
        });
    }
    Ok(rows)
}

fn cmd_bench(family: Family, m_min: usize, m_max: usize, n: usize, max_supply: u32, seed: u64) -> Result<u8> {
    let rows = bench_rows(family, m_min, m_max, n, max_supply, seed)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "m,n,B,do_calls,exo_calls,pushes_sat,pushes_nonsat,relabels,wall_us,exo_per_nm3,exo_per_m3_nm2")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.4},{:.4}",
            r.m, r.n, r.max_supply, r.do_calls, r.exo_calls, r.pushes_sat, r.pushes_nonsat, r.relabels, r.micros, r.ratio_multi, r.ratio_unit
        )?;
    }
    Ok(0)
}
