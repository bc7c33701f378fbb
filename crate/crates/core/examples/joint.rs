//! A two-dimensional target: one leader, one selector per support point.

use std::error::Error;

use distcrn::analysis::exact_joint;
use distcrn::compiler::compile_joint;
use distcrn::rational::rat;
use distcrn::Pmf;

fn main() -> Result<(), Box<dyn Error>> {
    let f = Pmf::new(2, [(vec![3, 1], rat(1, 6)), (vec![3, 2], rat(1, 3)), (vec![1, 5], rat(1, 2))])?;
    let crs = compile_joint(&f)?;
    println!("outputs {:?}", crs.output_names());
    let joint = exact_joint(&crs, 10_000)?;
    print!("{joint}");
    assert_eq!(joint, f);
    for d in 0..2 {
        println!("marginal {d}: {}", joint.project(d).to_string().trim().replace('\n', ", "));
    }
    Ok(())
}
