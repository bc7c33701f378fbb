use num::{BigInt, One, Zero};

use super::{Reaction, State};
use crate::rational::Rational;

/// Mass-action convention for reactions with repeated reactants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Convention {
    /// `k · Π x!/(x − r)!`, the falling factorial with no `1/r!` factor.
    #[default]
    Literal,
    /// `k · Π C(x, r)`, the usual combinatorial form.
    Combinatorial,
}

pub(crate) fn can_fire(r: &Reaction, x: &State) -> bool {
    r.source.terms().iter().all(|&(s, n)| x.0[s] >= n)
}

pub fn propensity(r: &Reaction, x: &State) -> Rational {
    propensity_with(r, x, Convention::Literal)
}

pub fn propensity_with(r: &Reaction, x: &State, convention: Convention) -> Rational {
    if !can_fire(r, x) {
        return Rational::zero();
    }
    let mut numer = BigInt::one();
    let mut denom = BigInt::one();
    for &(s, n) in r.source.terms() {
        let count = x.0[s];
        for i in 0..n {
            numer *= count - i;
            if convention == Convention::Combinatorial {
                denom *= i + 1;
            }
        }
    }
    &r.rate * Rational::new(numer, denom)
}

/// Floating-point propensity for simulation; `rate` is the pre-converted rate.
pub fn propensity_f64(r: &Reaction, rate: f64, x: &[u64], convention: Convention) -> f64 {
    let mut a = rate;
    for &(s, n) in r.source.terms() {
        let count = x[s];
        if count < n {
            return 0.0;
        }
        for i in 0..n {
            a *= (count - i) as f64;
            if convention == Convention::Combinatorial {
                a /= (i + 1) as f64;
            }
        }
    }
    a
}
