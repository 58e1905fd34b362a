//! Every cross-check against exhaustive enumeration on a few random markets.

use walras::bruteforce::EnumerationBudget;
use walras::cli::{verify_instance, Scope};
use walras::generate::corpus;

fn main() -> walras::Result<()> {
    let budget = EnumerationBudget::default();
    for (k, inst) in corpus(1, 5).iter().enumerate() {
        let checks = verify_instance(inst, Scope::All, &budget)?;
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        println!("market {k}: m = {}, n = {}, {} checks, {} failed", inst.items(), inst.buyer_count(), checks.len(), failed.len());
        for c in failed {
            println!("  {}: {}", c.name, c.detail);
        }
    }
    Ok(())
}
