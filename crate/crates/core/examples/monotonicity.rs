//! Extreme Walrasian prices before and after removing one unit of supply.

use walras::bruteforce::{brute_walrasian, monotonicity_from, EnumerationBudget, Perturbation};
use walras::generate::{generate, Family, GenParams};
use walras::model::PriceVector;

fn show(r: &Option<(PriceVector, PriceVector)>) -> String {
    match r {
        Some((lo, hi)) => format!("[{lo}, {hi}]"),
        None => "none".into(),
    }
}

fn main() -> walras::Result<()> {
    let params = GenParams { family: Family::MatroidRank, items: 3, buyers: 3, max_supply: 2, value_cap: 8, seed: 5 };
    let inst = generate(&params)?;
    let budget = EnumerationBudget::default();
    let w = brute_walrasian(&inst, &budget)?;
    println!("supply {:?}, {} Walrasian price vectors", inst.supply(), w.prices.len());
    for item in 0..inst.items() {
        let v = monotonicity_from(&inst, &w, Perturbation::SupplyDecrease { item }, &budget)?;
        println!("one less of e{}: {} -> {}, holds {}", item + 1, show(&v.before), show(&v.after), v.holds);
    }
    for buyer in 0..inst.buyer_count() {
        let v = monotonicity_from(&inst, &w, Perturbation::DemandDecrease { buyer }, &budget)?;
        println!("buyer {buyer} takes one less: {} -> {}, holds {}", show(&v.before), show(&v.after), v.holds);
    }
    Ok(())
}
