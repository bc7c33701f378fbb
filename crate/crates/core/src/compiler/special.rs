//! Compact networks for the Poisson, binomial and uniform distributions.
//! None of them is non-reacting-output, so all are flagged non-composable.

use num::Signed;

use super::CompileError;
use crate::crn::Crs;
use crate::rational::Rational;

fn positive(rate: &Rational) -> Result<(), CompileError> {
    if rate.is_positive() {
        Ok(())
    } else {
        Err(CompileError::NonPositiveRate(rate.clone()))
    }
}

/// `∅ →(k1) l`, `l →(k2) ∅`: Poisson with mean `k1/k2` at steady state.
pub fn special_poisson(k1: Rational, k2: Rational) -> Result<Crs, CompileError> {
    positive(&k1)?;
    positive(&k2)?;
    let mut c = Crs::new();
    c.add_species("l", 0)?;
    c.add_reaction(&[], &[("l", 1)], k1)?;
    c.add_reaction(&[("l", 1)], &[], k2)?;
    c.add_output("l")?;
    c.set_composable(false);
    Ok(c)
}

/// `l1 →(k1) l2`, `l2 →(k2) l1` with all `total` molecules starting in `l1`.
pub fn special_binomial(total: u64, k1: Rational, k2: Rational) -> Result<Crs, CompileError> {
    special_binomial_split(total, 0, k1, k2)
}

pub fn special_binomial_split(
    l1: u64,
    l2: u64,
    k1: Rational,
    k2: Rational,
) -> Result<Crs, CompileError> {
    positive(&k1)?;
    positive(&k2)?;
    let mut c = Crs::new();
    c.add_species("l1", l1)?;
    c.add_species("l2", l2)?;
    c.add_reaction(&[("l1", 1)], &[("l2", 1)], k1)?;
    c.add_reaction(&[("l2", 1)], &[("l1", 1)], k2)?;
    c.add_output("l1")?;
    c.add_output("l2")?;
    c.set_composable(false);
    Ok(c)
}

/// Conversion in both directions plus direct competition; the count of `l1`
/// is uniform on `0..=total` at steady state whatever the initial split.
pub fn special_uniform(total: u64, k: Rational) -> Result<Crs, CompileError> {
    special_uniform_split(total, 0, k)
}

pub fn special_uniform_split(l1: u64, l2: u64, k: Rational) -> Result<Crs, CompileError> {
    positive(&k)?;
    let mut c = Crs::new();
    c.add_species("l1", l1)?;
    c.add_species("l2", l2)?;
    c.add_reaction(&[("l1", 1)], &[("l2", 1)], k.clone())?;
    c.add_reaction(&[("l2", 1)], &[("l1", 1)], k.clone())?;
    c.add_reaction(&[("l1", 1), ("l2", 1)], &[("l1", 2)], k.clone())?;
    c.add_reaction(&[("l1", 1), ("l2", 1)], &[("l2", 2)], k)?;
    c.add_output("l1")?;
    c.add_output("l2")?;
    c.set_composable(false);
    Ok(c)
}
