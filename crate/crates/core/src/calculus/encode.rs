use num::{One, Zero};

use super::ast::{DExpr, Formula};
use super::CalculusError;
use crate::pmf::{Pmf, PmfError};
use crate::rational::{int, Rational};

/// A formula whose semantics under the empty environment is exactly `f`.
///
/// Support points are taken in ascending order; point `z_i` is selected with
/// weight `f(z_i) / (1 − Σ_{j<i} f(z_j))` and the last point takes the
/// remaining branch unconditionally.
pub fn encode_pmf(f: &Pmf) -> Result<Formula, CalculusError> {
    f.require_univariate()?;
    let points: Vec<(u64, Rational)> = f.iter1().map(|(v, p)| (v, p.clone())).collect();
    let (last, init) = points.split_last().ok_or(PmfError::Empty)?;

    let mut weights = Vec::with_capacity(init.len());
    let mut remaining = Rational::one();
    for (_, p) in init {
        if remaining.is_zero() {
            return Err(CalculusError::DegenerateWeight);
        }
        weights.push(p / &remaining);
        remaining -= p;
    }

    let point = |v: u64| Formula::scale(int(v), Formula::One);
    let mut acc = point(last.0);
    for ((v, _), w) in init.iter().zip(weights).rev() {
        acc = Formula::choice(point(*v), DExpr::constant(w)?, acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{eval, parse_formula, Environment};
    use crate::pmf::testing::arb_pmf;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        let f = Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))]).unwrap();
        let enc = encode_pmf(&f).unwrap();
        assert_eq!(enc, parse_formula("(2*one)_[1/6]:((5*one)_[2/5]:(10*one))").unwrap());
        assert_eq!(eval(&enc, &Environment::new()).unwrap(), f);

        assert_eq!(encode_pmf(&Pmf::dirac(0)).unwrap(), Formula::scale(int(0), Formula::One));
        assert_eq!(encode_pmf(&Pmf::dirac(7)).unwrap(), Formula::scale(int(7), Formula::One));
        assert!(encode_pmf(&Pmf::point_mass(vec![1, 2])).is_err());
    }

    #[test]
    fn four_points_use_remaining_mass() {
        let f = Pmf::univariate([(0, rat(1, 4)), (1, rat(1, 4)), (2, rat(1, 4)), (3, rat(1, 4))]).unwrap();
        let enc = encode_pmf(&f).unwrap();
        assert_eq!(
            enc,
            parse_formula("(0*one)_[1/4]:((1*one)_[1/3]:((2*one)_[1/2]:(3*one)))").unwrap()
        );
        assert_eq!(eval(&enc, &Environment::new()).unwrap(), f);
    }

    proptest! {
        #[test]
        fn roundtrip(f in arb_pmf(40, 8)) {
            prop_assert_eq!(eval(&encode_pmf(&f).unwrap(), &Environment::new()).unwrap(), f);
        }
    }
}
