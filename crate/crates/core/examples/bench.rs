//! Oracle calls of one polymatroid-sum run as m grows.

use walras::cli::bench_rows;
use walras::generate::Family;

fn main() -> walras::Result<()> {
    println!("m,do,exo,exo/(n m^3),micros");
    for r in bench_rows(Family::Oxs, 4, 12, 3, 2, 0)? {
        let ratio = r.exo_calls as f64 / (r.n * r.m.pow(3)) as f64;
        println!("{},{},{},{:.3},{}", r.m, r.do_calls, r.exo_calls, ratio, r.micros);
    }
    Ok(())
}
