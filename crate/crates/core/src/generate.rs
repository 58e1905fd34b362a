//! Seeded random markets.
//!
//! All randomness comes from PCG32 (XSH-RR, 64-bit state) seeded as
//! `pcg32_srandom_r(seed, 54)`; bounded draws use the rejection rule of the
//! PCG reference `pcg32_boundedrand_r`, so a seed produces the same market in
//! any language that follows the same recipe.

use rand_core::Rng;
use rand_pcg::Pcg32;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::valuations::{Matroid, TableValuation, Valuation};

pub const STREAM: u64 = 54;

pub struct Prng(Pcg32);

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng(Pcg32::new(seed, STREAM))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    /// Uniform in [0, bound).
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u32();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Uniform in [lo, hi].
    pub fn range(&mut self, lo: u32, hi: u32) -> u32 {
        lo + self.below(hi - lo + 1)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u32) as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    UnitDemand,
    Additive,
    MatroidRank,
    Oxs,
    Table,
    /// Buyers cycle through the other families.
    Mixed,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "unit_demand" => Family::UnitDemand,
            "additive" => Family::Additive,
            "matroid_rank" => Family::MatroidRank,
            "oxs" => Family::Oxs,
            "table" => Family::Table,
            "mixed" => Family::Mixed,
            other => return Err(Error::UnknownFamily(other.into())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub family: Family,
    pub items: usize,
    pub buyers: usize,
    /// Supplies are drawn from [1, max_supply].
    pub max_supply: u32,
    /// Every buyer's value for the whole supply stays at or below this.
    pub value_cap: i64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    UnitDemand,
    Additive,
    Uniform,
    Partition,
    Graphic,
    Oxs,
    Table,
}

const MIXED: [Kind; 7] =
    [Kind::UnitDemand, Kind::Additive, Kind::Uniform, Kind::Partition, Kind::Graphic, Kind::Oxs, Kind::Table];

pub fn generate(params: &GenParams) -> Result<Instance> {
    let GenParams { family, items: m, buyers: n, max_supply, value_cap, seed } = *params;
    if m == 0 || n == 0 || max_supply == 0 || value_cap < 0 {
        return Err(Error::InvalidInstance("items, buyers and max supply must be positive".into()));
    }
    let mut rng = Prng::new(seed);
    let supply: Vec<u32> = (0..m).map(|_| rng.range(1, max_supply)).collect();
    let offset = rng.below(MIXED.len() as u32) as usize;
    let cap = value_cap.min(u32::MAX as i64) as u32;
    let buyers = (0..n)
        .map(|i| {
            let kind = match family {
                Family::UnitDemand => Kind::UnitDemand,
                Family::Additive => Kind::Additive,
                Family::MatroidRank => *rng.pick(&[Kind::Uniform, Kind::Partition, Kind::Graphic]),
                Family::Oxs => Kind::Oxs,
                Family::Table => Kind::Table,
                Family::Mixed => MIXED[(offset + i) % MIXED.len()],
            };
            random_valuation(&mut rng, kind, &supply, cap)
        })
        .collect();
    Instance::new(supply, buyers)
}

fn weights(rng: &mut Prng, m: usize, cap: u32) -> Vec<i64> {
    (0..m).map(|_| rng.range(0, cap) as i64).collect()
}

fn random_valuation(rng: &mut Prng, kind: Kind, supply: &[u32], cap: u32) -> Valuation {
    let m = supply.len();
    let mut v = match kind {
        Kind::UnitDemand => Valuation::unit_demand(weights(rng, m, cap)),
        Kind::Additive => Valuation::additive(weights(rng, m, cap)),
        Kind::Uniform => {
            let rank = rng.range(1, m as u32) as usize;
            Valuation::matroid_rank(Matroid::Uniform { rank }, weights(rng, m, cap))
        }
        Kind::Partition => {
            let k = rng.range(1, m as u32) as usize;
            let mut blocks = vec![Vec::new(); k];
            for e in 0..m {
                blocks[rng.below(k as u32) as usize].push(e);
            }
            blocks.retain(|b| !b.is_empty());
            let caps = blocks.iter().map(|b| rng.range(1, b.len() as u32) as usize).collect();
            Valuation::matroid_rank(Matroid::Partition { blocks, caps }, weights(rng, m, cap))
        }
        Kind::Graphic => {
            let nodes = rng.range(2, m as u32 + 1);
            let edges = (0..m)
                .map(|_| {
                    let u = rng.below(nodes);
                    let w = (u + rng.range(1, nodes - 1)) % nodes;
                    (u as usize, w as usize)
                })
                .collect();
            Valuation::matroid_rank(Matroid::Graphic { edges }, weights(rng, m, cap))
        }
        Kind::Oxs => random_oxs(rng, m, cap),
        Kind::Table => {
            let inner = match rng.below(3) {
                0 => random_oxs(rng, m, cap),
                1 => Valuation::unit_demand(weights(rng, m, cap)),
                _ => {
                    let rank = rng.range(1, m as u32) as usize;
                    Valuation::matroid_rank(Matroid::Uniform { rank }, weights(rng, m, cap))
                }
            };
            let inner = shrink(rng, inner, supply, cap);
            let values = TableValuation::from_fn(supply, |z| inner.value(z)).expect("small box");
            return Valuation::table(values);
        }
    };
    v = shrink(rng, v, supply, cap);
    v
}

fn random_oxs(rng: &mut Prng, m: usize, cap: u32) -> Valuation {
    let right = rng.range(1, m as u32) as usize;
    let mut edges = Vec::new();
    for e in 0..m {
        for r in 0..right {
            if rng.below(2) == 1 {
                edges.push((e, r, rng.range(1, cap.max(1)) as i64));
            }
        }
    }
    Valuation::oxs(right, edges)
}

/// Lowers random positive weights by one until v(b) ≤ cap.
fn shrink(rng: &mut Prng, mut v: Valuation, supply: &[u32], cap: u32) -> Valuation {
    while v.value(supply) > cap as i64 {
        let slots: Vec<&mut i64> = match &mut v {
            Valuation::UnitDemand { weights } | Valuation::Additive { weights } => weights.iter_mut().collect(),
            Valuation::MatroidRank { weights, .. } => weights.iter_mut().collect(),
            Valuation::Oxs { edges, .. } => edges.iter_mut().map(|(_, _, w)| w).collect(),
            _ => return v,
        };
        let mut positive: Vec<&mut i64> = slots.into_iter().filter(|w| **w > 0).collect();
        let k = rng.below(positive.len() as u32) as usize;
        *positive[k] -= 1;
    }
    v
}

/// Seed-pinned corpus of small mixed markets: m ≤ 4, n ≤ 3, supplies ≤ 2
/// and every buyer's value for the whole supply at most 6.
pub fn corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = Prng::new(seed);
    (0..count)
        .map(|_| {
            let params = GenParams {
                family: Family::Mixed,
                items: rng.range(1, 4) as usize,
                buyers: rng.range(1, 3) as usize,
                max_supply: rng.range(1, 2),
                value_cap: 6,
                seed: ((rng.next_u32() as u64) << 32) | rng.next_u32() as u64,
            };
            generate(&params).expect("corpus parameters are valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::InstanceFile;

    #[test]
    fn pcg_reference_stream() {
        let mut rng = Prng::new(42);
        let got: Vec<u32> = (0..6).map(|_| rng.next_u32()).collect();
        assert_eq!(got, [0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e]);
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = Prng::new(7);
        for bound in [1, 2, 3, 7, 1000] {
            assert!((0..200).all(|_| rng.below(bound) < bound));
        }
        assert!((0..200).map(|_| rng.range(3, 5)).all(|x| (3..=5).contains(&x)));
    }

    #[test]
    fn same_seed_same_market() {
        for family in [Family::UnitDemand, Family::Additive, Family::MatroidRank, Family::Oxs, Family::Table, Family::Mixed] {
            let params = GenParams { family, items: 4, buyers: 3, max_supply: 3, value_cap: 9, seed: 11 };
            let a = InstanceFile::from_instance(&generate(&params).unwrap());
            let b = InstanceFile::from_instance(&generate(&params).unwrap());
            assert_eq!(a.digest(), b.digest());
        }
    }

    #[test]
    fn values_respect_cap() {
        for seed in 0..50 {
            let params = GenParams { family: Family::Mixed, items: 3, buyers: 3, max_supply: 2, value_cap: 5, seed };
            let inst = generate(&params).unwrap();
            assert!(inst.valuations().iter().all(|v| v.value(inst.supply()) <= 5));
        }
    }

    #[test]
    fn corpus_shape() {
        let c = corpus(1, 40);
        assert_eq!(c.len(), 40);
        for inst in &c {
            assert!((1..=4).contains(&inst.items()));
            assert!((1..=3).contains(&inst.buyer_count()));
            assert!(inst.supply().iter().all(|&b| (1..=2).contains(&b)));
        }
    }

    #[test]
    fn rejects_empty_markets() {
        let params = GenParams { family: Family::Oxs, items: 0, buyers: 1, max_supply: 1, value_cap: 3, seed: 0 };
        assert!(generate(&params).is_err());
    }
}
