//! Composition operators on non-reacting-output networks.
//!
//! Operands are copied with every species prefixed (`l.` for the first,
//! `r.` for the second) so that their name sets are disjoint, and the chosen
//! output of each operand is then renamed to the wire `o1`/`o2`. The result
//! has a single output `out`.

use num::{BigInt, Integer, One, Signed, Zero};

use super::{to_count, CompileError, CompileOptions, OUT};
use crate::calculus::{eval_weight, DExpr, Environment};
use crate::crn::Crs;
use crate::rational::{is_probability, Rational};

const LEFT: &str = "l.";
const RIGHT: &str = "r.";

/// Prefixed copy of `c` whose output `o` has been renamed to `wire`.
fn operand(c: &Crs, o: &str, prefix: &str, wire: &str) -> Result<Crs, CompileError> {
    if !c.composable() {
        return Err(CompileError::NonComposable);
    }
    let id = c.species_id(o).map_err(|_| CompileError::OutputNotFound(o.to_string()))?;
    if !c.outputs().contains(&id) {
        return Err(CompileError::OutputNotFound(o.to_string()));
    }
    if let Some((s, r)) = c.nro_violation() {
        return Err(CompileError::NotNro {
            species: c.species_name(s).to_string(),
            reaction: r,
        });
    }
    Ok(c.prefixed(prefix).rename(wire, &format!("{prefix}{o}"))?)
}

fn union(parts: &[&Crs]) -> Result<Crs, CompileError> {
    let mut net = Crs::new();
    for p in parts {
        net.absorb(p)?;
    }
    Ok(net)
}

fn finish(mut net: Crs) -> Result<Crs, CompileError> {
    net.clear_outputs();
    net.add_output(OUT)?;
    debug_assert!(net.is_nro());
    Ok(net)
}

/// `o1 → out`, `o2 → out`: the output settles to the sum.
pub fn op_sum(c1: &Crs, o1: &str, c2: &Crs, o2: &str) -> Result<Crs, CompileError> {
    let a = operand(c1, o1, LEFT, "o1")?;
    let b = operand(c2, o2, RIGHT, "o2")?;
    let mut net = union(&[&a, &b])?;
    net.add_species(OUT, 0)?;
    net.add_reaction(&[("o1", 1)], &[(OUT, 1)], Rational::one())?;
    net.add_reaction(&[("o2", 1)], &[(OUT, 1)], Rational::one())?;
    finish(net)
}

/// `o1 + o2 → out`: the output settles to the minimum.
pub fn op_min(c1: &Crs, o1: &str, c2: &Crs, o2: &str) -> Result<Crs, CompileError> {
    let a = operand(c1, o1, LEFT, "o1")?;
    let b = operand(c2, o2, RIGHT, "o2")?;
    let mut net = union(&[&a, &b])?;
    net.add_species(OUT, 0)?;
    net.add_reaction(&[("o1", 1), ("o2", 1)], &[(OUT, 1)], Rational::one())?;
    finish(net)
}

/// `o1 → k·out`; with `k = 0` the product side is empty.
pub fn op_mul(c: &Crs, o: &str, k: u64) -> Result<Crs, CompileError> {
    let a = operand(c, o, LEFT, "o1")?;
    let mut net = union(&[&a])?;
    net.add_species(OUT, 0)?;
    net.add_reaction(&[("o1", 1)], &[(OUT, k)], Rational::one())?;
    finish(net)
}

/// `k·o1 → out`: floor division; fewer than `k` leftover molecules stay put.
pub fn op_div(c: &Crs, o: &str, k: u64) -> Result<Crs, CompileError> {
    if k == 0 {
        return Err(CompileError::DivisorZero);
    }
    let a = operand(c, o, LEFT, "o1")?;
    let mut net = union(&[&a])?;
    net.add_species(OUT, 0)?;
    net.add_reaction(&[("o1", k)], &[(OUT, 1)], Rational::one())?;
    finish(net)
}

/// Convex combination with a constant weight: the leader `z` turns into the
/// catalyst `r1` with rate `p` or `r2` with rate `1 − p`, and the catalyst
/// then copies the matching operand's output into `out`.
pub fn op_con(c1: &Crs, o1: &str, c2: &Crs, o2: &str, p: &Rational) -> Result<Crs, CompileError> {
    con_impl(c1, o1, c2, o2, p, false)
}

/// Same as [`op_con`] but with unit rates: the race is between
/// `z + w1 → r1` and `z + w2 → r2` with `w1 = p·L`, `w2 = (1 − p)·L`.
pub fn op_con_ratefree(
    c1: &Crs,
    o1: &str,
    c2: &Crs,
    o2: &str,
    p: &Rational,
) -> Result<Crs, CompileError> {
    con_impl(c1, o1, c2, o2, p, true)
}

fn con_impl(
    c1: &Crs,
    o1: &str,
    c2: &Crs,
    o2: &str,
    p: &Rational,
    rate_free: bool,
) -> Result<Crs, CompileError> {
    if !is_probability(p) {
        return Err(CompileError::ProbabilityOutOfRange(p.clone()));
    }
    let a = operand(c1, o1, LEFT, "o1")?;
    let b = operand(c2, o2, RIGHT, "o2")?;
    let mut net = union(&[&a, &b])?;
    let q = Rational::one() - p;
    net.add_species("z", 1)?;
    net.add_species("r1", 0)?;
    net.add_species("r2", 0)?;
    if rate_free {
        let scale = Rational::from_integer(p.denom().clone());
        net.add_species("w1", to_count(&(p * &scale).to_integer())?)?;
        net.add_species("w2", to_count(&(&q * &scale).to_integer())?)?;
    }
    net.add_species(OUT, 0)?;
    for (weight, catalyst, aux) in [(p, "r1", "w1"), (&q, "r2", "w2")] {
        if weight.is_zero() {
            continue;
        }
        if rate_free {
            net.add_reaction(&[("z", 1), (aux, 1)], &[(catalyst, 1)], Rational::one())?;
        } else {
            net.add_reaction(&[("z", 1)], &[(catalyst, 1)], weight.clone())?;
        }
    }
    net.add_reaction(&[("o1", 1), ("r1", 1)], &[("r1", 1), (OUT, 1)], Rational::one())?;
    net.add_reaction(&[("o2", 1), ("r2", 1)], &[("r2", 1), (OUT, 1)], Rational::one())?;
    finish(net)
}

/// Convex combination whose weight depends on environment variables.
///
/// With `d = p0 + Σ p_i·c_i`, let `K` clear the denominators of the
/// coefficients, `M` those of the environment values, and `N = K·M`. Each
/// `c{i}` starts at `M·E(c_i)` and, at the fast rate `ρ`, releases `K·p_i`
/// pairs `r1 + rt`; `rt` then cancels against `r2` (also fast). Starting
/// from `r1 = rt = N·p0` and `r2 = N`, this leaves `r1 = N·[[d]]` and
/// `r2 = N·(1 − [[d]])`. The leader races `z + r1 → s1` against
/// `z + r2 → s2` at rate 1, and `s1`/`s2` catalyse the copy of the chosen
/// operand into `out`. The race can start before the fast reactions finish,
/// which introduces an error that shrinks as `ρ` grows.
///
/// A weight without variables is delegated to [`op_con`].
pub fn op_con_env(
    c1: &Crs,
    o1: &str,
    c2: &Crs,
    o2: &str,
    d: &DExpr,
    env: &Environment,
    opts: &CompileOptions,
) -> Result<Crs, CompileError> {
    opts.validate()?;
    // Also validates that every variable is bound and the weight is in range.
    eval_weight(d, env)?;
    if d.is_constant() {
        return if opts.rate_free {
            op_con_ratefree(c1, o1, c2, o2, &d.constant)
        } else {
            op_con(c1, o1, c2, o2, &d.constant)
        };
    }
    let (coef_scale, env_scale, values) = scales(d, env)?;
    let total = &coef_scale * &env_scale;
    let k = Rational::from_integer(coef_scale.clone());
    let m = Rational::from_integer(env_scale.clone());
    let n = Rational::from_integer(total.clone());

    let a = operand(c1, o1, LEFT, "o1")?;
    let b = operand(c2, o2, RIGHT, "o2")?;
    let mut net = union(&[&a, &b])?;
    let base = to_count(&(&n * &d.constant).to_integer())?;
    net.add_species("z", 1)?;
    net.add_species("r1", base)?;
    net.add_species("r2", to_count(&total)?)?;
    net.add_species("rt", base)?;
    let mut releases = Vec::with_capacity(d.terms.len());
    for (i, ((p, _), value)) in d.terms.iter().zip(&values).enumerate() {
        let name = format!("c{}", i + 1);
        net.add_species(&name, to_count(&(&m * *value).to_integer())?)?;
        releases.push((name, to_count(&(&k * p).to_integer())?));
    }
    net.add_species("s1", 0)?;
    net.add_species("s2", 0)?;
    net.add_species(OUT, 0)?;

    let slow = Rational::one();
    let fast = opts.rho.clone();
    debug_assert!(fast.is_positive());
    net.add_reaction(&[("z", 1), ("r1", 1)], &[("s1", 1)], slow.clone())?;
    net.add_reaction(&[("z", 1), ("r2", 1)], &[("s2", 1)], slow.clone())?;
    net.add_reaction(&[("o1", 1), ("s1", 1)], &[("s1", 1), (OUT, 1)], slow.clone())?;
    net.add_reaction(&[("o2", 1), ("s2", 1)], &[("s2", 1), (OUT, 1)], slow)?;
    for (name, copies) in &releases {
        net.add_reaction(&[(name, 1)], &[("r1", *copies), ("rt", *copies)], fast.clone())?;
    }
    net.add_reaction(&[("r2", 1), ("rt", 1)], &[], fast)?;
    finish(net)
}

/// Denominator scales `(K, M)` of a weight and the values of its variables.
fn scales<'a>(
    d: &DExpr,
    env: &'a Environment,
) -> Result<(BigInt, BigInt, Vec<&'a Rational>), CompileError> {
    let values: Vec<&Rational> = d
        .terms
        .iter()
        .map(|(_, name)| env.lookup(name))
        .collect::<Result<_, _>>()?;
    let coef_scale = d
        .terms
        .iter()
        .map(|(p, _)| p.denom().clone())
        .fold(d.constant.denom().clone(), |acc, den| acc.lcm(&den));
    let env_scale = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    Ok((coef_scale, env_scale, values))
}

/// Initial count of `r2` that [`op_con_env`] uses for this weight.
pub(crate) fn con_env_total(d: &DExpr, env: &Environment) -> Result<BigInt, CompileError> {
    let (k, m, _) = scales(d, env)?;
    Ok(k * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile_direct;
    use crate::crn::CrnError;
    use crate::pmf::Pmf;
    use crate::rational::{int, rat};
    use crate::analysis::exact_output;
    use proptest::prelude::*;

    fn constant(v: u64) -> Crs {
        let mut c = Crs::new();
        c.add_species(OUT, v).unwrap();
        c.add_output(OUT).unwrap();
        c
    }

    #[test]
    fn sum_wiring() {
        let c = op_sum(&constant(2), OUT, &constant(3), OUT).unwrap();
        assert_eq!(c.species(), &["o1", "o2", "out"]);
        assert_eq!(c.initial_state().0, vec![2, 3, 0]);
        assert_eq!(c.reactions().len(), 2);
        assert!(c.is_nro());
        let nested = op_sum(&c, OUT, &c, OUT).unwrap();
        assert!(nested.has_species("l.o1") && nested.has_species("r.o2"));
        assert_eq!(nested.reactions().len(), 6);
    }

    #[test]
    fn operand_checks() {
        let direct = compile_direct(&Pmf::dirac(3)).unwrap();
        assert_eq!(
            op_sum(&direct, "z", &direct, OUT),
            Err(CompileError::OutputNotFound("z".into()))
        );
        assert_eq!(
            op_mul(&direct, "nope", 2),
            Err(CompileError::OutputNotFound("nope".into()))
        );
        let special = crate::compiler::special_poisson(int(1), int(1)).unwrap();
        assert_eq!(op_mul(&special, "l", 2), Err(CompileError::NonComposable));

        let mut reacting = constant(1);
        reacting.add_species("x", 0).unwrap();
        reacting.add_reaction(&[(OUT, 1)], &[("x", 1)], int(1)).unwrap();
        assert!(matches!(op_div(&reacting, OUT, 2), Err(CompileError::NotNro { .. })));
        assert_eq!(op_div(&direct, OUT, 0), Err(CompileError::DivisorZero));
    }

    #[test]
    fn mul_zero_has_empty_product() {
        let c = op_mul(&constant(4), OUT, 0).unwrap();
        assert!(c.reactions()[0].product.is_empty());
    }

    #[test]
    fn con_shape_matches_constant_weight_example() {
        let c = op_con(&constant(10), OUT, &constant(20), OUT, &rat(3, 10)).unwrap();
        let rates: Vec<_> = c.reactions().iter().map(|r| r.rate.clone()).collect();
        assert_eq!(rates, vec![rat(3, 10), rat(7, 10), int(1), int(1)]);
        assert_eq!(c.initial_count("z"), Ok(1));
        assert!(op_con(&constant(1), OUT, &constant(2), OUT, &rat(3, 2)).is_err());
        // p = 1 drops the zero-rate branch.
        assert_eq!(op_con(&constant(1), OUT, &constant(2), OUT, &int(1)).unwrap().reactions().len(), 3);
    }

    #[test]
    fn con_env_reproduces_thousand_scale_example() {
        let d = DExpr::new(int(0), vec![(int(1), "c".into())]).unwrap();
        let env = Environment::new().with("c", rat(3, 1000)).unwrap();
        let c = op_con_env(&constant(10), OUT, &constant(20), OUT, &d, &env, &CompileOptions::default())
            .unwrap();
        assert_eq!(c.initial_count("r2"), Ok(1000));
        assert_eq!(c.initial_count("c1"), Ok(3));
        assert_eq!(c.initial_count("r1"), Ok(0));
        assert_eq!(c.initial_count("z"), Ok(1));
        assert_eq!(c.reactions().len(), 6);
        assert!(c.is_nro());
        let fast: Vec<_> = c
            .reactions()
            .iter()
            .filter(|r| r.rate == int(1_000_000))
            .collect();
        assert_eq!(fast.len(), 2);
    }

    #[test]
    fn con_env_errors_and_delegation() {
        let d = DExpr::new(int(0), vec![(int(1), "c".into())]).unwrap();
        let err = op_con_env(&constant(1), OUT, &constant(2), OUT, &d, &Environment::new(), &CompileOptions::default());
        assert!(matches!(err, Err(CompileError::Calculus(_))));
        let p = DExpr::constant(rat(1, 4)).unwrap();
        let c = op_con_env(&constant(1), OUT, &constant(2), OUT, &p, &Environment::new(), &CompileOptions::default())
            .unwrap();
        assert_eq!(c, op_con(&constant(1), OUT, &constant(2), OUT, &rat(1, 4)).unwrap());
        let slow = CompileOptions::default().with_rho(rat(1, 2));
        assert!(matches!(
            op_con_env(&constant(1), OUT, &constant(2), OUT, &d, &Environment::new().with("c", int(1)).unwrap(), &slow),
            Err(CompileError::RateSeparation(_))
        ));
        let _ = CrnError::NotEnabled(0);
    }

    fn arb_small_pmf() -> impl Strategy<Value = Pmf> {
        proptest::collection::btree_map(0u64..=4, 1i64..=6, 1..=3).prop_map(|w| {
            let total: i64 = w.values().sum();
            Pmf::univariate(w.into_iter().map(|(v, n)| (v, rat(n, total)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn operators_commute_with_pmf_operations(
            a in arb_small_pmf(),
            b in arb_small_pmf(),
            k in 0u64..=3,
            d in 1u64..=3,
            p in (0i64..=6, 1i64..=6).prop_map(|(x, y)| rat(x.min(y), y)),
        ) {
            let (ca, cb) = (compile_direct(&a).unwrap(), compile_direct(&b).unwrap());
            let solve = |c: &Crs| exact_output(c, 100_000).unwrap();
            prop_assert_eq!(solve(&op_sum(&ca, "out", &cb, "out").unwrap()), a.convolve(&b).unwrap());
            prop_assert_eq!(solve(&op_min(&ca, "out", &cb, "out").unwrap()), a.minimum(&b).unwrap());
            prop_assert_eq!(solve(&op_mul(&ca, "out", k).unwrap()), a.mul_nat(k).unwrap());
            prop_assert_eq!(solve(&op_div(&ca, "out", d).unwrap()), a.div_nat(d).unwrap());
            let mixed = op_con_ratefree(&ca, "out", &cb, "out", &p).unwrap();
            prop_assert!(mixed.is_nro());
            prop_assert_eq!(solve(&mixed), Pmf::convex(&a, &b, &p).unwrap());
        }
    }
}
