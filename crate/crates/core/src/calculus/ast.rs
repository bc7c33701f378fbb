use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};

use super::CalculusError;
use crate::rational::{format_rational_short, is_probability, Rational};

/// A formula of the calculus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    One,
    Zero,
    Sum(Box<Formula>, Box<Formula>),
    Min(Box<Formula>, Box<Formula>),
    /// `k·P` with `k ≥ 0`; the rational is always in lowest terms.
    Scale(Rational, Box<Formula>),
    /// `(P1)_D : (P2)`: `P1` with probability `[[D]]`, otherwise `P2`.
    Choice(Box<Formula>, DExpr, Box<Formula>),
}

impl Formula {
    pub fn sum(a: Formula, b: Formula) -> Formula {
        Formula::Sum(Box::new(a), Box::new(b))
    }

    pub fn min(a: Formula, b: Formula) -> Formula {
        Formula::Min(Box::new(a), Box::new(b))
    }

    pub fn scale(k: Rational, p: Formula) -> Formula {
        assert!(k >= Rational::zero(), "scale factor must be nonnegative");
        Formula::Scale(k, Box::new(p))
    }

    pub fn choice(a: Formula, weight: DExpr, b: Formula) -> Formula {
        Formula::Choice(Box::new(a), weight, Box::new(b))
    }

    /// Variables occurring in any weight of the formula.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::One | Formula::Zero => {}
            Formula::Sum(a, b) | Formula::Min(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Scale(_, p) => p.collect_vars(out),
            Formula::Choice(a, d, b) => {
                out.extend(d.terms.iter().map(|(_, v)| v.clone()));
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::One | Formula::Zero => 0,
            Formula::Scale(_, p) => 1 + p.depth(),
            Formula::Sum(a, b) | Formula::Min(a, b) | Formula::Choice(a, _, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Number of choice nodes whose weight mentions a variable.
    pub fn external_choices(&self) -> usize {
        match self {
            Formula::One | Formula::Zero => 0,
            Formula::Scale(_, p) => p.external_choices(),
            Formula::Sum(a, b) | Formula::Min(a, b) => a.external_choices() + b.external_choices(),
            Formula::Choice(a, d, b) => {
                usize::from(!d.terms.is_empty()) + a.external_choices() + b.external_choices()
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::One => f.write_str("one"),
            Formula::Zero => f.write_str("zero"),
            Formula::Sum(a, b) => {
                write!(f, "{a} + ")?;
                if matches!(**b, Formula::Sum(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::Min(a, b) => write!(f, "min({a}, {b})"),
            Formula::Scale(k, p) => {
                write!(f, "{}*", format_rational_short(k))?;
                if matches!(**p, Formula::Sum(..)) {
                    write!(f, "({p})")
                } else {
                    write!(f, "{p}")
                }
            }
            Formula::Choice(a, d, b) => write!(f, "({a})_[{d}]:({b})"),
        }
    }
}

/// Affine weight `constant + Σ coefficient·variable` with every coefficient
/// in [0, 1] and their total at most 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DExpr {
    pub constant: Rational,
    pub terms: Vec<(Rational, String)>,
}

impl DExpr {
    pub fn new(constant: Rational, terms: Vec<(Rational, String)>) -> Result<Self, CalculusError> {
        let d = DExpr { constant, terms };
        d.validate()?;
        Ok(d)
    }

    pub fn constant(p: Rational) -> Result<Self, CalculusError> {
        DExpr::new(p, Vec::new())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn validate(&self) -> Result<(), CalculusError> {
        if !is_probability(&self.constant) {
            return Err(CalculusError::InvalidWeight(format!(
                "constant {} is outside [0, 1]",
                self.constant
            )));
        }
        let mut seen = BTreeSet::new();
        let mut total = self.constant.clone();
        for (p, name) in &self.terms {
            if !is_probability(p) {
                return Err(CalculusError::InvalidWeight(format!(
                    "coefficient {p} of `{name}` is outside [0, 1]"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(CalculusError::InvalidWeight(format!(
                    "variable `{name}` appears twice"
                )));
            }
            total += p;
        }
        if total > Rational::one() {
            return Err(CalculusError::InvalidWeight(format!(
                "coefficients sum to {total}, which exceeds 1"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, name)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*{name}", format_rational_short(p))?;
        }
        if self.terms.is_empty() {
            f.write_str(&format_rational_short(&self.constant))
        } else if !self.constant.is_zero() {
            write!(f, " + {}", format_rational_short(&self.constant))
        } else {
            Ok(())
        }
    }
}

/// Valuation of environment variables, each in [0, 1].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Environment {
    values: BTreeMap<String, Rational>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Rational) -> Result<(), CalculusError> {
        let name = name.into();
        if !is_probability(&value) {
            return Err(CalculusError::EnvironmentRange { name, value });
        }
        self.values.insert(name, value);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, value: Rational) -> Result<Self, CalculusError> {
        self.bind(name, value)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&Rational, CalculusError> {
        self.get(name)
            .ok_or_else(|| CalculusError::UnboundVariable(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.values.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
