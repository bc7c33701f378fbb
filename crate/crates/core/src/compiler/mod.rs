//! Networks whose output species settles to a prescribed distribution.
//!
//! Every network built here, except the special (Poisson, binomial, uniform)
//! ones, is non-reacting-output: output species never appear as reactants, so
//! their counts only grow and the network can be wired into the operators of
//! [`operators`]. [`translate`] composes those operators along the structure
//! of a calculus formula.

mod direct;
mod operators;
mod special;
mod translate;

use num::{BigInt, One};
use thiserror::Error;

use crate::calculus::CalculusError;
use crate::crn::CrnError;
use crate::pmf::PmfError;
use crate::rational::Rational;

pub use direct::{compile_direct, compile_direct_ratefree, compile_joint, compile_truncated};
pub use operators::{op_con, op_con_ratefree, op_con_env, op_div, op_min, op_mul, op_sum};
pub use special::{
    special_binomial, special_binomial_split, special_poisson, special_uniform,
    special_uniform_split,
};
pub use translate::{leaders, translate, translate_with_manifest, Manifest};

/// Name of the output species of every compiled network.
pub const OUT: &str = "out";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("cannot compile a pmf with empty support")]
    EmptySupport,
    #[error("output species `{species}` is consumed by reaction {reaction}; not a non-reacting-output network")]
    NotNro { species: String, reaction: usize },
    #[error("network is flagged non-composable")]
    NonComposable,
    #[error("`{0}` is not an output species of the operand")]
    OutputNotFound(String),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(Rational),
    #[error("rate {0} must be positive")]
    NonPositiveRate(Rational),
    #[error("divisor must be at least 1")]
    DivisorZero,
    #[error("initial count {0} does not fit in a machine word")]
    NonRepresentableCount(BigInt),
    #[error("rate separation must be at least 1, got {0}")]
    RateSeparation(Rational),
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Pmf(#[from] PmfError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Knobs shared by the constructions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileOptions {
    /// Realize constant-weight choices with equal rates and weight species
    /// instead of weighted rates.
    pub rate_free: bool,
    /// Ratio between the fast weight-computing reactions and the slow branch
    /// race in environment-dependent choices.
    pub rho: Rational,
    /// State budget suggested to the analysis of the compiled network.
    pub state_cap_hint: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            rate_free: false,
            rho: Rational::from_integer(BigInt::from(1_000_000)),
            state_cap_hint: 1_000_000,
        }
    }
}

impl CompileOptions {
    pub fn with_rho(mut self, rho: Rational) -> Self {
        self.rho = rho;
        self
    }

    pub(crate) fn validate(&self) -> Result<(), CompileError> {
        if self.rho < Rational::one() {
            return Err(CompileError::RateSeparation(self.rho.clone()));
        }
        Ok(())
    }
}

pub(crate) fn to_count(value: &BigInt) -> Result<u64, CompileError> {
    use num::ToPrimitive;
    value
        .to_u64()
        .ok_or_else(|| CompileError::NonRepresentableCount(value.clone()))
}
