//! Evaluate a formula of the distribution calculus exactly.
//!
//!     cargo run --example eval_formula -- "(one)_[1/1000*c + 1/5]:(4*one)" c=1/2

use std::error::Error;

use distcrn::calculus::{eval, parse_formula};
use distcrn::rational::parse_rational;
use distcrn::Environment;

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let text = args
        .next()
        .unwrap_or_else(|| "(one + 2*one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)".into());
    let mut env = Environment::new();
    for binding in args {
        let (name, value) = binding.split_once('=').ok_or("bindings look like name=a/b")?;
        env.bind(name, parse_rational(value).ok_or("bad rational")?)?;
    }
    if env.is_empty() {
        env.bind("c", parse_rational("1/2").unwrap())?;
    }
    let f = parse_formula(&text)?;
    println!("formula   {f}");
    println!("variables {:?}", f.free_vars());
    print!("{}", eval(&f, &env)?);
    Ok(())
}
