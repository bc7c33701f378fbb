use num::{One, Signed, Zero};

use super::{Pmf, PmfError};
use crate::rational::{is_probability, to_natural, Rational};

impl Pmf {
    /// Distribution of `X + Y` for independent `X ~ self`, `Y ~ other`.
    pub fn convolve(&self, other: &Pmf) -> Result<Pmf, PmfError> {
        self.binary_univariate(other, |a, b| a + b)
    }

    /// Distribution of `min(X, Y)` for independent `X ~ self`, `Y ~ other`.
    pub fn minimum(&self, other: &Pmf) -> Result<Pmf, PmfError> {
        self.binary_univariate(other, |a, b| a.min(b))
    }

    fn binary_univariate(
        &self,
        other: &Pmf,
        combine: impl Fn(u64, u64) -> u64,
    ) -> Result<Pmf, PmfError> {
        if self.dim != other.dim {
            return Err(PmfError::DimensionMismatch(self.dim, other.dim));
        }
        self.require_univariate()?;
        let combine = &combine;
        let pairs = self.iter1().flat_map(|(a, pa)| {
            other
                .iter1()
                .map(|(b, pb)| (vec![combine(a, b)], pa * pb))
                .collect::<Vec<_>>()
        });
        Ok(Pmf::accumulate(1, pairs))
    }

    /// Moves the mass at `y` to `k·y`; `k = 0` collapses everything onto 0.
    pub fn mul_nat(&self, k: u64) -> Result<Pmf, PmfError> {
        self.require_univariate()?;
        Ok(Pmf::accumulate(
            1,
            self.iter1().map(|(y, p)| (vec![y * k], p.clone())),
        ))
    }

    /// Moves the mass at `y` to `⌊y / k⌋`.
    pub fn div_nat(&self, k: u64) -> Result<Pmf, PmfError> {
        self.require_univariate()?;
        if k == 0 {
            return Err(PmfError::DivisorZero);
        }
        Ok(Pmf::accumulate(
            1,
            self.iter1().map(|(y, p)| (vec![y / k], p.clone())),
        ))
    }

    /// Scaling by a nonnegative rational `k = k1/k2` in lowest terms:
    /// multiply by `k1`, then floor-divide by `k2`.
    pub fn scale(&self, k: &Rational) -> Result<Pmf, PmfError> {
        if k.is_negative() {
            return Err(PmfError::ProbabilityOutOfRange(k.clone()));
        }
        let numer = to_natural(&Rational::from_integer(k.numer().clone()))
            .expect("numerator fits in u64");
        let denom = to_natural(&Rational::from_integer(k.denom().clone()))
            .expect("denominator fits in u64");
        self.mul_nat(numer)?.div_nat(denom)
    }

    /// The mixture `p·a + (1 − p)·b`.
    pub fn convex(a: &Pmf, b: &Pmf, p: &Rational) -> Result<Pmf, PmfError> {
        if a.dim != b.dim {
            return Err(PmfError::DimensionMismatch(a.dim, b.dim));
        }
        if !is_probability(p) {
            return Err(PmfError::ProbabilityOutOfRange(p.clone()));
        }
        let q = Rational::one() - p;
        let left = a.iter().map(|(k, pa)| (k.clone(), pa * p));
        let right = b.iter().map(|(k, pb)| (k.clone(), pb * &q));
        Ok(Pmf::accumulate(a.dim, left.chain(right)))
    }

    /// Σ |a(n) − b(n)| over the union of supports; always in [0, 2].
    pub fn l1_distance(&self, other: &Pmf) -> Result<Rational, PmfError> {
        if self.dim != other.dim {
            return Err(PmfError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(l1_of(self.iter(), other))
    }

    /// Worst-case multiplicative agreement: the minimum over the union of
    /// supports of `min(a/b, b/a)`. Equals 1 iff the pmfs are equal and 0 when
    /// some point is charged by only one of them.
    pub fn ratio_closeness(&self, other: &Pmf) -> Result<Rational, PmfError> {
        if self.dim != other.dim {
            return Err(PmfError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .union_ratios(other)
            .min()
            .unwrap_or_else(Rational::one))
    }

    /// The multiplicative error measure taken literally as a maximum over
    /// points. Any single agreeing point drives it to 1.
    pub fn ratio_closeness_max(&self, other: &Pmf) -> Result<Rational, PmfError> {
        if self.dim != other.dim {
            return Err(PmfError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .union_ratios(other)
            .max()
            .unwrap_or_else(Rational::one))
    }

    fn union_ratios<'a>(&'a self, other: &'a Pmf) -> impl Iterator<Item = Rational> + 'a {
        let only_other = other
            .support()
            .filter(move |k| !self.entries.contains_key(*k))
            .map(|_| Rational::zero());
        self.iter()
            .map(move |(k, a)| {
                let b = other.prob(k);
                if b.is_zero() {
                    Rational::zero()
                } else {
                    let r = a / &b;
                    if r > Rational::one() {
                        r.recip()
                    } else {
                        r
                    }
                }
            })
            .chain(only_other)
    }
}

/// L¹ distance between a (possibly sub-normalized) mass function and a pmf.
pub(crate) fn l1_of<'a>(
    left: impl Iterator<Item = (&'a Vec<u64>, &'a Rational)>,
    right: &Pmf,
) -> Rational {
    let mut seen = std::collections::BTreeSet::new();
    let mut total = Rational::zero();
    for (k, a) in left {
        total += (a - right.prob(k)).abs();
        seen.insert(k.clone());
    }
    for (k, b) in right.iter() {
        if !seen.contains(k) {
            total += b;
        }
    }
    total
}
