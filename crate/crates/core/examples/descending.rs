//! Descending auction: maximal Walrasian prices move non-monotonically as
//! buyer 0's weights grow.

use walras::auctions::{default_start, descending, AuctionMode, AuctionOptions};
use walras::fixtures::{unit_demand_row, UNIT_DEMAND_ROWS};

fn main() -> walras::Result<()> {
    for (k, (weights, _)) in UNIT_DEMAND_ROWS.iter().enumerate() {
        let inst = unit_demand_row(k);
        let start = default_start(&inst, AuctionMode::Descending);
        let (p, trace) = descending(&inst, start.clone(), AuctionOptions::checked())?;
        println!("v0 = {weights:?}: {start} -> {p} in {} rounds", trace.rounds.len());
    }
    Ok(())
}
