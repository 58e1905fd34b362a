//! Splitting every unit into its own item keeps the auction outcome.

use walras::auctions::{ascending, AuctionOptions};
use walras::generate::{generate, Family, GenParams};
use walras::model::PriceVector;
use walras::valuations::copy_to_unit_supply;

fn main() -> walras::Result<()> {
    let params = GenParams { family: Family::Additive, items: 3, buyers: 2, max_supply: 3, value_cap: 9, seed: 8 };
    let inst = generate(&params)?;
    let (copied, proj) = copy_to_unit_supply(&inst)?;
    println!("supply {:?} becomes {} unit items, copy -> item {:?}", inst.supply(), copied.items(), proj);

    let (p, t) = ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::checked())?;
    let (q, u) = ascending(&copied, PriceVector::zeros(copied.items()), AuctionOptions::checked())?;
    println!("multi-unit  {p}: do {} exo {}", t.counters.do_calls, t.counters.exo_calls);
    println!("unit copies {q}: do {} exo {}", u.counters.do_calls, u.counters.exo_calls);
    Ok(())
}
