//! Exchange graph on six two-unit items and the overdemanded set it yields.

use walras::demand_sets::{build_exchange_graph, min_max_overdemanded};
use walras::fixtures;
use walras::model::{ItemSet, PriceVector};
use walras::polymatroid_sum::SolverOptions;
use walras::valuations::DemandSide;

fn main() -> walras::Result<()> {
    let inst = fixtures::six_items();
    let alloc = fixtures::six_items_allocation();
    let mut reported = fixtures::six_items_reported_weights();
    let graph = build_exchange_graph(&mut reported, inst.supply(), &alloc, DemandSide::Minimal)?;
    for a in &graph.arcs {
        println!("e{} -> e{}  buyer {} weight {}", a.from + 1, a.to + 1, a.buyer, a.weight);
    }
    let oversold: ItemSet = [0, 1].into_iter().collect();
    println!("items reaching the oversold ones: {:?}", graph.reaching(oversold));

    let report = min_max_overdemanded(&inst, &PriceVector::zeros(inst.items()), SolverOptions::checked())?;
    println!("solver: minimal most-overdemanded set {:?}, od = {}", report.set, report.magnitude);
    Ok(())
}
