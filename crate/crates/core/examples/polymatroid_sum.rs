//! Max Σ_e min(Σ_i z_i(e), b(e)) over demanded bundles, with the certificate
//! checked by enumeration.

use walras::bruteforce::{brute_polymatroid_sum, EnumerationBudget};
use walras::generate::{generate, Family, GenParams};
use walras::model::PriceVector;
use walras::polymatroid_sum::{check_certificate, solve, SolverOptions};
use walras::valuations::DemandSide;

fn main() -> walras::Result<()> {
    let params = GenParams { family: Family::Oxs, items: 4, buyers: 3, max_supply: 2, value_cap: 10, seed: 89 };
    let inst = generate(&params)?;
    let p = PriceVector::zeros(inst.items());
    let budget = EnumerationBudget::default();
    for side in [DemandSide::Minimal, DemandSide::Maximal] {
        let sol = solve(&inst, &p, side, SolverOptions::checked())?;
        let brute = brute_polymatroid_sum(&inst, &p, side, &budget)?;
        println!("{} side: value {} (enumeration {})", side.name(), sol.value, brute.primal);
        for (i, z) in sol.bundles.iter().enumerate() {
            println!("  buyer {i}: {z}");
        }
        println!("  levels {:?}, certificate {:?}", sol.levels, sol.certificate);
        println!("  certificate ok: {}", check_certificate(&inst, &p, side, &sol.bundles, sol.certificate, &budget)?);
        let c = sol.counters;
        println!(
            "  pushes {}/{}, relabels {}, demand calls {}, exchange calls {}",
            c.saturating_pushes, c.nonsaturating_pushes, c.relabels, c.oracle.do_calls, c.oracle.exo_calls
        );
    }
    Ok(())
}
