//! Complementary buyers: no Walrasian prices exist and the auction says so.

use walras::auctions::{ascending, AuctionOptions};
use walras::bruteforce::{brute_walrasian, EnumerationBudget};
use walras::fixtures;
use walras::model::PriceVector;
use walras::Error;

fn main() -> walras::Result<()> {
    let inst = fixtures::no_equilibrium();
    let w = brute_walrasian(&inst, &EnumerationBudget::default())?;
    println!("Walrasian price vectors on the grid: {}", w.prices.len());
    match ascending(&inst, PriceVector::zeros(inst.items()), AuctionOptions::default()) {
        Err(Error::RoundLimitExceeded { rounds, prices, reason }) => {
            println!("ascending stopped after {rounds} rounds at {prices}: {reason}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
