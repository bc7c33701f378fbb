//! Cookbook: a two-way switch driven by an external signal.
//!
//! The weight `c` is an input concentration in [0, 1]. The network commits to
//! the "high" branch (output 5) with probability `c` and to the "low" branch
//! (output 1) otherwise, so the long-run output tracks the signal.

use std::error::Error;

use distcrn::analysis::exact_output;
use distcrn::calculus::{parse_dexpr, Formula};
use distcrn::compiler::{op_con_env, translate, CompileOptions};
use distcrn::rational::{int, rat, to_f64};
use distcrn::Environment;

fn main() -> Result<(), Box<dyn Error>> {
    let opts = CompileOptions::default().with_rho(int(10_000));
    let empty = Environment::new();
    let high = translate(&Formula::scale(int(5), Formula::One), &empty, &opts)?;
    let low = translate(&Formula::One, &empty, &opts)?;
    let weight = parse_dexpr("1*c")?;

    for c in [rat(0, 1), rat(1, 4), rat(1, 2), rat(9, 10)] {
        let env = Environment::new().with("c", c.clone())?;
        let switch = op_con_env(&high, "out", &low, "out", &weight, &env, &opts)?;
        let got = exact_output(&switch, 100_000)?;
        println!("c = {c:>4}: P(high) = {:.5}", to_f64(&got.prob1(5)));
    }
    Ok(())
}
