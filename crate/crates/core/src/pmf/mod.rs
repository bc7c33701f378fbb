//! Finite-support probability mass functions over tuples of naturals.
//!
//! Every probability is an exact rational. Points with zero mass are never
//! stored, so two [`Pmf`]s are equal exactly when they describe the same
//! distribution.

mod ops;
mod tails;
mod text;
mod truncate;

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

pub use tails::{geometric, poisson_approx, TailSource};
pub use text::{format_pmf, parse_pmf};
pub use truncate::{truncate, TruncationResult};

/// A point of the support: one natural per dimension.
pub type Point = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PmfError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires a one-dimensional pmf, got dimension {0}")]
    NotUnivariate(usize),
    #[error("pmf dimension must be at least 1")]
    ZeroDimension,
    #[error("point {point:?} has length {len}, expected {dim}")]
    PointLength { point: Point, len: usize, dim: usize },
    #[error("negative probability at {0:?}")]
    NegativeMass(Point),
    #[error("duplicate point {0:?}")]
    DuplicatePoint(Point),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(Rational),
    #[error("divisor must be positive")]
    DivisorZero,
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(Rational),
    #[error("epsilon {0} must lie strictly between 0 and 1")]
    EpsilonOutOfRange(Rational),
    #[error("tail source ended with {0} of the mass unaccounted for")]
    IncompleteSource(Rational),
    #[error("empty pmf")]
    Empty,
}

/// Exact-rational probability mass function with finite support in ℕ^dim.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pmf {
    dim: usize,
    entries: BTreeMap<Point, Rational>,
}

impl Pmf {
    /// Builds a pmf, merging nothing: duplicate points are rejected. Zero
    /// entries are dropped and the total must be exactly one.
    pub fn new(
        dim: usize,
        entries: impl IntoIterator<Item = (Point, Rational)>,
    ) -> Result<Self, PmfError> {
        if dim == 0 {
            return Err(PmfError::ZeroDimension);
        }
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (point, p) in entries {
            if point.len() != dim {
                let len = point.len();
                return Err(PmfError::PointLength { point, len, dim });
            }
            if p.is_negative() {
                return Err(PmfError::NegativeMass(point));
            }
            if map.contains_key(&point) {
                return Err(PmfError::DuplicatePoint(point));
            }
            total += &p;
            if !p.is_zero() {
                map.insert(point, p);
            }
        }
        if !total.is_one() {
            return Err(PmfError::NotNormalized(total));
        }
        Ok(Pmf { dim, entries: map })
    }

    /// One-dimensional constructor from `(value, probability)` pairs.
    pub fn univariate(
        entries: impl IntoIterator<Item = (u64, Rational)>,
    ) -> Result<Self, PmfError> {
        Pmf::new(1, entries.into_iter().map(|(v, p)| (vec![v], p)))
    }

    /// Accumulates mass over possibly repeated points; used by operations
    /// whose result is known to be normalized.
    pub(crate) fn accumulate(
        dim: usize,
        entries: impl IntoIterator<Item = (Point, Rational)>,
    ) -> Self {
        let mut map: BTreeMap<Point, Rational> = BTreeMap::new();
        for (point, p) in entries {
            debug_assert_eq!(point.len(), dim);
            if p.is_zero() {
                continue;
            }
            *map.entry(point).or_insert_with(Rational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let pmf = Pmf { dim, entries: map };
        debug_assert!(pmf.total().is_one(), "accumulated mass is {}", pmf.total());
        pmf
    }

    /// Point mass at `value`.
    pub fn point_mass(value: Point) -> Self {
        assert!(!value.is_empty(), "point mass needs at least one dimension");
        let dim = value.len();
        let mut entries = BTreeMap::new();
        entries.insert(value, Rational::one());
        Pmf { dim, entries }
    }

    pub fn dirac(value: u64) -> Self {
        Pmf::point_mass(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of `point`, zero outside the support.
    pub fn prob(&self, point: &[u64]) -> Rational {
        self.entries.get(point).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn prob1(&self, value: u64) -> Rational {
        self.prob(&[value])
    }

    /// Support points with their probabilities, in ascending point order.
    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.entries.iter()
    }

    /// Univariate view; panics on higher dimensions.
    pub fn iter1(&self) -> impl Iterator<Item = (u64, &Rational)> {
        assert_eq!(self.dim, 1, "iter1 on a {}-dimensional pmf", self.dim);
        self.entries.iter().map(|(k, p)| (k[0], p))
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.entries.keys()
    }

    pub(crate) fn total(&self) -> Rational {
        self.entries.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    pub(crate) fn require_univariate(&self) -> Result<(), PmfError> {
        if self.dim == 1 {
            Ok(())
        } else {
            Err(PmfError::NotUnivariate(self.dim))
        }
    }

    /// Marginal on one coordinate.
    pub fn project(&self, coordinate: usize) -> Pmf {
        assert!(coordinate < self.dim);
        Pmf::accumulate(
            1,
            self.entries
                .iter()
                .map(|(k, p)| (vec![k[coordinate]], p.clone())),
        )
    }

    /// Mean of a univariate pmf.
    pub fn mean(&self) -> Rational {
        assert_eq!(self.dim, 1);
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (k, p)| acc + p * crate::rational::int(k[0]))
    }
}

impl fmt::Debug for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if k.len() == 1 {
                write!(f, "{}: {}", k[0], p)?;
            } else {
                write!(f, "{:?}: {}", k, p)?;
            }
        }
        f.write_str("}")
    }
}

impl fmt::Display for Pmf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_pmf(self))
    }
}
