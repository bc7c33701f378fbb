//! Compile discrete probability distributions into chemical reaction
//! networks and check the result.
//!
//! * [`pmf`]: exact finite-support pmfs and the operations on them.
//! * [`calculus`]: a small calculus of distributions with a parser, an exact
//!   evaluator, and an encoder from pmfs back to formulas.
//! * [`crn`]: reaction networks, mass-action propensities, the text format.
//! * [`compiler`]: networks whose output species settles to a target
//!   distribution, and operators composing such networks.
//! * [`analysis`]: state-space exploration, exact steady states, and a
//!   seeded Gillespie simulator.
//! * [`cli`]: the `distcrn` command-line driver.

use std::fmt;

pub mod analysis;
pub mod calculus;
pub mod cli;
pub mod compiler;
pub mod crn;
pub mod pmf;
pub mod rational;

pub use calculus::{DExpr, Environment, Formula};
pub use crn::{Crs, Reaction, State};
pub use pmf::Pmf;
pub use rational::Rational;

/// Positioned diagnostic from one of the text formats. Line and column are
/// 1-based; 0 means the error concerns the whole input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for TextError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for TextError {}
