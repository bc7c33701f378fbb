//! Infinite-support families in tail order, for truncation.

use num::{BigInt, One, Zero};

use crate::rational::{int, Rational};

/// Lazily produced `(value, probability)` pairs with nonincreasing tail mass.
pub type TailSource = Box<dyn Iterator<Item = (u64, Rational)>>;

/// Geometric pmf on ℕ: `P(k) = p·(1 − p)^k`, exact.
pub fn geometric(p: Rational) -> TailSource {
    assert!(p > Rational::zero() && p <= Rational::one());
    let q = Rational::one() - &p;
    let mut current = p;
    Box::new((0u64..).map(move |k| {
        let out = (k, current.clone());
        current = &current * &q;
        out
    }))
}

/// Poisson pmf with rational mean, with `e^{-mean}` replaced by a rational
/// approximation accurate to about `2^-bits`.
pub fn poisson_approx(mean: Rational, bits: u32) -> TailSource {
    assert!(mean > Rational::zero());
    let tolerance = Rational::new(BigInt::one(), num::pow(BigInt::from(2), bits as usize));
    // e^mean via its Taylor series; stop once the next term is below tolerance
    // relative to the partial sum (all terms are positive).
    let mut exp = Rational::zero();
    let mut term = Rational::one();
    let mut n = 0u64;
    loop {
        exp += &term;
        n += 1;
        term = term * &mean / int(n);
        if n as f64 > 2.0 * crate::rational::to_f64(&mean) && term < &exp * &tolerance {
            break;
        }
    }
    let base = exp.recip();
    let mut current = base;
    Box::new((0u64..).map(move |k| {
        let out = (k, current.clone());
        current = &current * &mean / int(k + 1);
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn geometric_prefix() {
        let got: Vec<_> = geometric(rat(1, 2)).take(3).collect();
        assert_eq!(got, vec![(0, rat(1, 2)), (1, rat(1, 4)), (2, rat(1, 8))]);
    }

    #[test]
    fn poisson_matches_float() {
        let got: Vec<_> = poisson_approx(rat(1, 1), 80).take(5).collect();
        let e = (-1.0f64).exp();
        let expect = [e, e, e / 2.0, e / 6.0, e / 24.0];
        for ((k, p), want) in got.iter().zip(expect) {
            assert!((crate::rational::to_f64(p) - want).abs() < 1e-15, "k={k}");
        }
    }
}
