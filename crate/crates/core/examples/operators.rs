//! Composing compiled networks with the sum, min, scaling and choice
//! operators, and checking each against the pmf operation.

use std::error::Error;

use distcrn::analysis::exact_output;
use distcrn::compiler::{compile_direct, op_con, op_div, op_min, op_mul, op_sum};
use distcrn::rational::rat;
use distcrn::Pmf;

fn main() -> Result<(), Box<dyn Error>> {
    let f1 = Pmf::univariate([(3, rat(1, 6)), (0, rat(5, 6))])?;
    let f2 = Pmf::univariate([(5, rat(1, 2)), (1, rat(1, 2))])?;
    let (c1, c2) = (compile_direct(&f1)?, compile_direct(&f2)?);
    let p = rat(1, 3);

    let cases = [
        ("sum", op_sum(&c1, "out", &c2, "out")?, f1.convolve(&f2)?),
        ("min", op_min(&c1, "out", &c2, "out")?, f1.minimum(&f2)?),
        ("2*", op_mul(&c2, "out", 2)?, f2.mul_nat(2)?),
        ("/2", op_div(&c2, "out", 2)?, f2.div_nat(2)?),
        ("con", op_con(&c1, "out", &c2, "out", &p)?, Pmf::convex(&f1, &f2, &p)?),
    ];
    for (name, crs, expected) in cases {
        let got = exact_output(&crs, 100_000)?;
        println!(
            "{name:>3}: {:>2} species, {:>2} reactions, {} [{}]",
            crs.species().len(),
            crs.reactions().len(),
            got.to_string().trim().replace('\n', ", "),
            if got == expected { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
