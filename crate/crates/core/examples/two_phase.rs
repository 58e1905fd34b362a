//! Two-phase and greedy auctions from arbitrary starting prices.

use walras::auctions::{greedy, two_phase, AuctionOptions};
use walras::generate::{generate, Family, GenParams, Prng};
use walras::model::PriceVector;

fn main() -> walras::Result<()> {
    let params = GenParams { family: Family::Mixed, items: 5, buyers: 3, max_supply: 2, value_cap: 12, seed: 3 };
    let inst = generate(&params)?;
    let mut rng = Prng::new(99);
    for _ in 0..3 {
        let start = PriceVector::new((0..inst.items()).map(|_| rng.range(0, 12) as i64).collect())?;
        let (a, ta) = two_phase(&inst, start.clone(), AuctionOptions::default())?;
        let (b, tb) = greedy(&inst, start.clone(), AuctionOptions::default())?;
        println!("start {start}");
        println!("  two-phase {a} after {} rounds", ta.rounds.len());
        println!("  greedy    {b} after {} rounds", tb.rounds.len());
    }
    Ok(())
}
