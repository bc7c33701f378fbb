//! Every finite pmf is the meaning of some formula.

use std::error::Error;

use distcrn::calculus::{encode_pmf, eval};
use distcrn::pmf::parse_pmf;
use distcrn::Environment;

fn main() -> Result<(), Box<dyn Error>> {
    let f = parse_pmf("2 : 1/6\n5 : 1/3\n10 : 1/2\n")?;
    let formula = encode_pmf(&f)?;
    println!("{formula}");
    assert_eq!(eval(&formula, &Environment::new())?, f);
    Ok(())
}
