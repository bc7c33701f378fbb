//! The distribution calculus: formulas built from `one`, `zero`, sum,
//! minimum, rational scaling and convex choice, whose weights may depend on
//! environment variables.

mod ast;
mod encode;
mod eval;
pub(crate) mod parser;

use thiserror::Error;

use crate::pmf::PmfError;
use crate::rational::Rational;
use crate::TextError;

pub use ast::{DExpr, Environment, Formula};
pub use encode::encode_pmf;
pub use eval::{eval, eval_weight};
pub use parser::{parse_dexpr, parse_formula, parse_formula_file};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("syntax error at {0}")]
    Syntax(TextError),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("environment value {value} for `{name}` is outside [0, 1]")]
    EnvironmentRange { name: String, value: Rational },
    #[error("degenerate weight while encoding: remaining mass is zero before the last point")]
    DegenerateWeight,
    #[error(transparent)]
    Pmf(#[from] PmfError),
}
