//! Seeded Gillespie runs: the histogram is identical for any thread count.

use std::error::Error;

use distcrn::analysis::{compare, empirical_pmf, exact_output, histogram_tsv, ssa_run, SsaOptions};
use distcrn::compiler::compile_direct;
use distcrn::rational::{rat, to_f64};
use distcrn::Pmf;

fn main() -> Result<(), Box<dyn Error>> {
    let target = Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))])?;
    let crs = compile_direct(&target)?;
    let exact = exact_output(&crs, 1000)?;

    for trials in [100, 1_000, 10_000] {
        let stats = ssa_run(&crs, &SsaOptions { trials, seed: 42, threads: 4, ..SsaOptions::default() })?;
        let empirical = empirical_pmf(stats.histogram("out").unwrap())?;
        println!("{trials:>6} trials: L1 {:.4}", to_f64(&compare(&exact, &empirical)?.l1));
        if trials == 10_000 {
            let serial = ssa_run(&crs, &SsaOptions { trials, seed: 42, threads: 1, ..SsaOptions::default() })?;
            assert_eq!(serial, stats);
            print!("{}", histogram_tsv(stats.histogram("out").unwrap()));
        }
    }
    Ok(())
}
