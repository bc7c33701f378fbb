//! Translate a formula compositionally and compare the network's long-run
//! output with the formula's semantics, at several rate separations.

use std::error::Error;

use distcrn::analysis::{compare, exact_output};
use distcrn::calculus::{eval, parse_formula};
use distcrn::compiler::{translate_with_manifest, CompileOptions};
use distcrn::rational::{int, rat};
use distcrn::Environment;

fn main() -> Result<(), Box<dyn Error>> {
    let f = parse_formula("(one)_[1/2*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)")?;
    let env = Environment::new().with("c", rat(1, 2))?;
    let target = eval(&f, &env)?;
    println!("target {}", target.to_string().trim().replace('\n', ", "));

    for rho in [100u64, 10_000, 1_000_000] {
        let opts = CompileOptions::default().with_rho(int(rho));
        let (crs, manifest) = translate_with_manifest(&f, &env, &opts)?;
        let got = exact_output(&crs, 1_000_000)?;
        let cmp = compare(&target, &got)?;
        println!(
            "rho {rho:>7}: {} species, leaders {:?}, L1 {:.3e}, ratio {:.6}",
            crs.species().len(),
            manifest.leaders,
            distcrn::rational::to_f64(&cmp.l1),
            distcrn::rational::to_f64(&cmp.ratio)
        );
    }

    let exact = parse_formula("(min(one + one, 3*one))_[1/3]:(1/2*(one + 2*one))")?;
    let (crs, _) = translate_with_manifest(&exact, &Environment::new(), &CompileOptions::default())?;
    assert_eq!(exact_output(&crs, 1_000_000)?, eval(&exact, &Environment::new())?);
    println!("constant weights: exact");
    Ok(())
}
