use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::{Pmf, PmfError};
use crate::rational::Rational;

/// Finite prefix of a pmf together with the mass that was dropped. The kept
/// probabilities are the original ones; nothing is renormalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationResult {
    pub kept: BTreeMap<u64, Rational>,
    pub mass_lost: Rational,
}

/// Keeps the shortest prefix of `source` whose remaining mass is below
/// `epsilon`.
pub fn truncate(
    source: impl IntoIterator<Item = (u64, Rational)>,
    epsilon: &Rational,
) -> Result<TruncationResult, PmfError> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(PmfError::EpsilonOutOfRange(epsilon.clone()));
    }
    let mut kept = BTreeMap::new();
    let mut remaining = Rational::one();
    for (value, p) in source {
        if remaining < *epsilon {
            break;
        }
        if p.is_negative() {
            return Err(PmfError::NegativeMass(vec![value]));
        }
        if kept.contains_key(&value) {
            return Err(PmfError::DuplicatePoint(vec![value]));
        }
        remaining -= &p;
        if remaining.is_negative() {
            return Err(PmfError::NotNormalized(Rational::one() - remaining));
        }
        if !p.is_zero() {
            kept.insert(value, p);
        }
    }
    if remaining >= *epsilon {
        return Err(PmfError::IncompleteSource(remaining));
    }
    if kept.is_empty() {
        return Err(PmfError::Empty);
    }
    Ok(TruncationResult {
        kept,
        mass_lost: remaining,
    })
}

impl TruncationResult {
    pub fn kept_support(&self) -> Vec<u64> {
        self.kept.keys().copied().collect()
    }

    /// The kept prefix scaled back up to total mass one.
    pub fn renormalized(&self) -> Pmf {
        let total = Rational::one() - &self.mass_lost;
        Pmf::accumulate(
            1,
            self.kept.iter().map(|(v, p)| (vec![*v], p / &total)),
        )
    }

    /// The kept prefix with the lost mass parked on `value`.
    pub fn with_residual_at(&self, value: u64) -> Pmf {
        Pmf::accumulate(
            1,
            self.kept
                .iter()
                .map(|(v, p)| (vec![*v], p.clone()))
                .chain(std::iter::once((vec![value], self.mass_lost.clone()))),
        )
    }

    /// Upper bound on the L¹ distance between the untruncated source and
    /// `other`: exact on the kept prefix, plus the whole lost tail.
    pub fn l1_upper_bound(&self, other: &Pmf) -> Rational {
        let kept: Vec<(Vec<u64>, Rational)> = self
            .kept
            .iter()
            .map(|(v, p)| (vec![*v], p.clone()))
            .collect();
        super::ops::l1_of(kept.iter().map(|(k, p)| (k, p)), other) + &self.mass_lost
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::geometric;
    use crate::rational::{int, rat};

    #[test]
    fn geometric_eighth() {
        let t = truncate(geometric(rat(1, 2)), &rat(1, 8)).unwrap();
        // 1/2 + 1/4 leaves 1/4 >= 1/8, so 2 must be kept too; then 1/8 remains,
        // which is not below 1/8, so 3 is kept as well.
        assert_eq!(t.kept_support(), vec![0, 1, 2, 3]);
        assert_eq!(t.mass_lost, rat(1, 16));
        assert!(t.mass_lost < rat(1, 8));
    }

    #[test]
    fn geometric_half() {
        let t = truncate(geometric(rat(1, 2)), &rat(1, 2)).unwrap();
        assert_eq!(t.kept_support(), vec![0, 1]);
        assert_eq!(t.mass_lost, rat(1, 4));
    }

    #[test]
    fn finite_pmf_is_kept_whole() {
        let f = Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))]).unwrap();
        let t = truncate(f.iter1().map(|(v, p)| (v, p.clone())), &rat(1, 1000)).unwrap();
        assert_eq!(t.mass_lost, int(0));
        assert_eq!(t.renormalized(), f);
        assert_eq!(t.with_residual_at(0), Pmf::univariate([(0, int(0)), (2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))]).unwrap());
    }

    #[test]
    fn epsilon_range() {
        for bad in [int(0), int(1), rat(-1, 2), int(3)] {
            assert_eq!(
                truncate(geometric(rat(1, 2)), &bad),
                Err(PmfError::EpsilonOutOfRange(bad.clone()))
            );
        }
    }

    #[test]
    fn incomplete_source_is_reported() {
        let short = vec![(0u64, rat(1, 2))];
        assert_eq!(
            truncate(short, &rat(1, 4)),
            Err(PmfError::IncompleteSource(rat(1, 2)))
        );
    }

    #[test]
    fn l1_bound_of_residual_pmf() {
        let t = truncate(geometric(rat(1, 2)), &rat(1, 1024)).unwrap();
        assert!(t.mass_lost < rat(1, 1024));
        let realized = t.with_residual_at(0);
        assert_eq!(t.l1_upper_bound(&realized), &t.mass_lost * int(2));
    }
}
