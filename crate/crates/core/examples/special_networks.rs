//! The compact Poisson, binomial and uniform networks. They are not
//! composable, so they are analysed on their own.

use std::error::Error;

use distcrn::analysis::{explore, occupation_time, output_marginals, steady_state};
use distcrn::compiler::{special_binomial, special_poisson, special_uniform_split};
use distcrn::rational::int;

fn main() -> Result<(), Box<dyn Error>> {
    for (a, b) in [(6, 0), (0, 6), (3, 3)] {
        let crs = special_uniform_split(a, b, int(1))?;
        let report = steady_state(&explore(&crs, 1000)?);
        let m = &output_marginals(&crs, &report)?[0].1;
        println!("uniform from ({a},{b}): {}", m.exact().unwrap().to_string().trim().replace('\n', ", "));
    }

    let crs = special_binomial(4, int(1), int(3))?;
    let report = steady_state(&explore(&crs, 1000)?);
    let m = &output_marginals(&crs, &report)?[0].1;
    println!("binomial(4, 3/4): {}", m.exact().unwrap().to_string().trim().replace('\n', ", "));

    // Never quiesces: estimate by time averaging along one long run.
    let crs = special_poisson(int(5), int(1))?;
    let occ = occupation_time(&crs, "l", 1, 200_000, 0.1)?;
    for (y, p) in occ.distribution.iter().take(10) {
        println!("poisson(5) P({y}) ~ {p:.4}");
    }
    Ok(())
}
