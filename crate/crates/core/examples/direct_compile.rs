//! Compile a finite pmf into a leader-race network and check it exactly.

use std::error::Error;

use distcrn::analysis::{explore, output_marginals, steady_state};
use distcrn::compiler::compile_direct;
use distcrn::crn::format_crn;
use distcrn::rational::rat;
use distcrn::Pmf;

fn main() -> Result<(), Box<dyn Error>> {
    let target = Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))])?;
    let crs = compile_direct(&target)?;
    print!("{}", format_crn(&crs, &[]));

    let space = explore(&crs, 1000)?;
    let report = steady_state(&space);
    println!("# {} states, method {}", space.len(), report.method.name());
    for (name, m) in output_marginals(&crs, &report)? {
        let got = m.exact().expect("absorbing networks solve exactly");
        println!("# {name}: {}", got.to_string().trim().replace('\n', ", "));
        assert_eq!(got, &target);
    }
    Ok(())
}
