//! Ascending auction from zero on three unit-demand buyers, round by round.

use walras::auctions::{ascending, AuctionOptions};
use walras::fixtures;
use walras::model::PriceVector;

fn main() -> walras::Result<()> {
    let inst = fixtures::three_buyers_base();
    let (p, trace) = ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::checked())?;
    for r in &trace.rounds {
        println!(
            "round {}: raise {:?} (od {}), L {} -> {}, prices {}",
            r.index, r.set, r.magnitude, r.lyapunov_before, r.lyapunov_after, r.prices
        );
    }
    println!("minimal Walrasian prices {p}");
    for (i, z) in trace.allocation.bundles.iter().enumerate() {
        println!("  buyer {i} gets {z}");
    }
    Ok(())
}
