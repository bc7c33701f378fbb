use num::Zero;

use super::ast::{DExpr, Environment, Formula};
use super::CalculusError;
use crate::pmf::Pmf;
use crate::rational::{is_probability, Rational};

/// `[[D]]_E = p + Σ p_i·E(c_i)`.
pub fn eval_weight(d: &DExpr, env: &Environment) -> Result<Rational, CalculusError> {
    let mut total = d.constant.clone();
    for (p, name) in &d.terms {
        total += p * env.lookup(name)?;
    }
    if !is_probability(&total) {
        return Err(CalculusError::InvalidWeight(format!(
            "weight `{d}` evaluates to {total}, outside [0, 1]"
        )));
    }
    Ok(total)
}

/// Exact semantics of a formula under an environment.
pub fn eval(f: &Formula, env: &Environment) -> Result<Pmf, CalculusError> {
    Ok(match f {
        Formula::One => Pmf::dirac(1),
        Formula::Zero => Pmf::dirac(0),
        Formula::Sum(a, b) => eval(a, env)?.convolve(&eval(b, env)?)?,
        Formula::Min(a, b) => eval(a, env)?.minimum(&eval(b, env)?)?,
        Formula::Scale(k, p) => {
            if k.is_zero() {
                // Still check that the operand is well-formed under `env`.
                eval(p, env)?;
                Pmf::dirac(0)
            } else {
                eval(p, env)?.scale(k)?
            }
        }
        Formula::Choice(a, d, b) => {
            let w = eval_weight(d, env)?;
            Pmf::convex(&eval(a, env)?, &eval(b, env)?, &w)?
        }
    })
}
