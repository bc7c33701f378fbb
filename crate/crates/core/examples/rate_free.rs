//! Same target, realized with unit rates and weight species instead of
//! weighted rates.

use std::error::Error;

use distcrn::analysis::exact_output;
use distcrn::compiler::{compile_direct, compile_direct_ratefree};
use distcrn::crn::format_crn;
use distcrn::rational::rat;
use distcrn::Pmf;

fn main() -> Result<(), Box<dyn Error>> {
    let target = Pmf::univariate([(0, rat(1, 4)), (3, rat(1, 4)), (7, rat(1, 2))])?;
    for (label, crs) in [("rates", compile_direct(&target)?), ("rate-free", compile_direct_ratefree(&target)?)] {
        let got = exact_output(&crs, 10_000)?;
        println!("{label:>9}: {} reactions, matches = {}", crs.reactions().len(), got == target);
        print!("{}", format_crn(&crs, &[]));
    }
    Ok(())
}
