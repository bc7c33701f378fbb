//! Infinite-support targets: keep a finite prefix, send the lost mass to a
//! sink branch.

use std::error::Error;

use distcrn::analysis::exact_output;
use distcrn::compiler::compile_truncated;
use distcrn::pmf::{geometric, poisson_approx};
use distcrn::rational::rat;

fn main() -> Result<(), Box<dyn Error>> {
    let eps = rat(1, 1024);
    let (crs, t) = compile_truncated(geometric(rat(1, 2)), &eps)?;
    println!("geometric(1/2): kept {:?}, massLost {}", t.kept_support(), t.mass_lost);
    let got = exact_output(&crs, 100_000)?;
    println!("P(out = 0) = {} (target 1/2 plus the lost mass)", got.prob1(0));

    let (crs, t) = compile_truncated(poisson_approx(rat(3, 1), 40), &rat(1, 100))?;
    println!("poisson(3): kept {} points, massLost ~ {:.3e}", t.kept.len(), distcrn::rational::to_f64(&t.mass_lost));
    println!("network has {} reactions", crs.reactions().len());
    Ok(())
}
