//! Long-run behaviour of reaction networks: exact steady states on the
//! reachable state space, and stochastic simulation.

mod linalg;
mod report;
mod space;
mod ssa;
mod steady;

use thiserror::Error;

use crate::crn::{Crs, CrnError};
use crate::pmf::{Pmf, PmfError};

pub use report::{
    compare, empirical_pmf, format_f64, histogram_tsv, is_normalized, joint_output, l1_f64, output_marginals,
    steady_json, steady_lines, trajectory_json, trajectory_lines, Comparison, Marginal,
};
pub use space::{eager_reactions, explore, explore_reduced, explore_with, StateSpace};
pub use ssa::{occupation_time, ssa_run, Occupation, SsaOptions, StopReason, TrajectoryStats, Trial};
pub use steady::{bsccs, steady_state, steady_state_with, Distribution, Mass, Method, SteadyOptions, SteadyReport};

/// Default bound on the number of explored states.
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("state space exceeds the cap of {0} states")]
    StateCapExceeded(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("burn-in fraction {0} is outside [0, 1)")]
    BurnIn(f64),
    #[error("trajectory became quiescent after {0} jumps")]
    Quiescent(u64),
    #[error("the distribution was solved in floating point")]
    NotExact,
    #[error("network must have exactly one output species, found {0}")]
    OutputCount(usize),
    #[error("thread pool: {0}")]
    Threads(String),
    #[error(transparent)]
    Crn(#[from] CrnError),
    #[error(transparent)]
    Pmf(#[from] PmfError),
}

/// Exact long-run distribution of the single output species.
pub fn exact_output(crs: &Crs, cap: usize) -> Result<Pmf, AnalysisError> {
    if crs.outputs().len() != 1 {
        return Err(AnalysisError::OutputCount(crs.outputs().len()));
    }
    exact_joint(crs, cap)
}

/// Exact long-run joint distribution of all output species.
///
/// Tries the reduced state space first; it is used only when the reduced
/// chain ends in quiescent absorbing states, where it is known to give the
/// same answer as the full one.
pub fn exact_joint(crs: &Crs, cap: usize) -> Result<Pmf, AnalysisError> {
    let (_, report) = solve_absorbing(crs, cap)?;
    joint_output(crs, &report)
}

/// Explores and solves `crs`, using the reduced state space when it is
/// sound to do so.
pub fn solve_absorbing(crs: &Crs, cap: usize) -> Result<(StateSpace, SteadyReport), AnalysisError> {
    let reduced = explore_reduced(crs, cap)?;
    let report = steady_state(&reduced);
    if report.bsccs.iter().all(|b| b.len() == 1) && reduced.all_bottoms_quiescent(crs) {
        return Ok((reduced, report));
    }
    let sp = explore(crs, cap)?;
    let report = steady_state(&sp);
    Ok((sp, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::parser::tests::arb_formula;
    use crate::calculus::{eval, Environment};
    use crate::compiler::{special_binomial, special_uniform_split, translate, CompileOptions};
    use crate::crn::tests::example_one;
    use crate::crn::Reaction;
    use crate::rational::{int, rat};
    use num::One;
    use proptest::prelude::*;

    fn scaled(c: &Crs, factor: &crate::Rational) -> Crs {
        let mut s = Crs::new();
        for (name, &x) in c.species().iter().zip(&c.initial_state().0) {
            s.add_species(name, x).unwrap();
        }
        for r in c.reactions() {
            s.push_reaction(Reaction { rate: &r.rate * factor, ..r.clone() }).unwrap();
        }
        for name in c.output_names() {
            s.add_output(name).unwrap();
        }
        s
    }

    #[test]
    fn absorption_ignores_uniform_rate_scaling() {
        let f = crate::calculus::parse_formula("(2*one)_[1/3]:(min(one + one, 3*one) + one)").unwrap();
        let c = translate(&f, &Environment::new(), &CompileOptions::default()).unwrap();
        for net in [example_one(), c] {
            let base = steady_state(&explore(&net, 100_000).unwrap());
            let fast = steady_state(&explore(&scaled(&net, &int(7)), 100_000).unwrap());
            assert_eq!(base.distribution, fast.distribution);
            assert_eq!(base.absorption, fast.absorption);
        }
    }

    #[test]
    fn uniform_independent_of_initial_split() {
        let k = 9u64;
        let splits = [(k, 0), (0, k), (k.div_ceil(2), k / 2)];
        let marginals: Vec<Pmf> = splits
            .iter()
            .map(|&(a, b)| {
                let c = special_uniform_split(a, b, int(1)).unwrap();
                let r = steady_state(&explore(&c, 1000).unwrap());
                crate::crn::marginal(r.distribution.exact().unwrap().iter().map(|(x, p)| (x, p)), &c.outputs()[..1]).unwrap()
            })
            .collect();
        assert!(marginals.windows(2).all(|w| w[0] == w[1]));
        for y in 0..=k {
            assert_eq!(marginals[0].prob1(y), rat(1, k as i64 + 1));
        }
    }

    /// Two-state chain `l1 ⇄ l2` with one molecule, solved by hand.
    fn one_molecule_c1(k1: &crate::Rational, k2: &crate::Rational) -> crate::Rational {
        k2 / (k1 + k2)
    }

    fn binomial_oracle(n: u64, c1: &crate::Rational) -> Pmf {
        let q = crate::Rational::one() - c1;
        let mut choose = int(1);
        let mut points = Vec::new();
        for y in 0..=n {
            points.push((y, &choose * num::pow(c1.clone(), y as usize) * num::pow(q.clone(), (n - y) as usize)));
            choose = choose * int(n - y) / int(y + 1);
        }
        Pmf::univariate(points).unwrap()
    }

    #[test]
    fn binomial_small_k_confirms_parameter() {
        for (k1, k2) in [(int(1), int(3)), (rat(2, 5), int(7))] {
            let c1 = one_molecule_c1(&k1, &k2);
            for n in 1..=3 {
                let c = special_binomial(n, k1.clone(), k2.clone()).unwrap();
                let r = steady_state(&explore(&c, 100).unwrap());
                let m = crate::crn::marginal(r.distribution.exact().unwrap().iter().map(|(x, p)| (x, p)), &c.outputs()[..1])
                    .unwrap();
                assert_eq!(m, binomial_oracle(n, &c1));
            }
        }
        let c = special_binomial(2, int(1), int(3)).unwrap();
        let r = steady_state(&explore(&c, 100).unwrap());
        let m = crate::crn::marginal(r.distribution.exact().unwrap().iter().map(|(x, p)| (x, p)), &c.outputs()[..1]).unwrap();
        assert_eq!(m, Pmf::univariate([(0, rat(1, 16)), (1, rat(6, 16)), (2, rat(9, 16))]).unwrap());
    }

    #[test]
    fn ssa_error_shrinks_with_trials() {
        let c = example_one();
        let exact = exact_output(&c, 1000).unwrap();
        let l1 = |trials| {
            let s = ssa_run(&c, &SsaOptions { trials, seed: 42, ..SsaOptions::default() }).unwrap();
            crate::rational::to_f64(&exact.l1_distance(&empirical_pmf(s.histogram("out").unwrap()).unwrap()).unwrap())
        };
        let (a, b, d) = (l1(100), l1(1000), l1(10_000));
        assert!(d < b && b < a, "{a} {b} {d}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduced_space_agrees_with_full(f in arb_formula(false)) {
            let env = Environment::new();
            let c = translate(&f, &env, &CompileOptions::default()).unwrap();
            let Ok(full) = explore(&c, 20_000) else { return Ok(()) };
            let full = joint_output(&c, &steady_state(&full)).unwrap();
            let (_, report) = solve_absorbing(&c, 20_000).unwrap();
            let reduced = joint_output(&c, &report).unwrap();
            prop_assert_eq!(&reduced, &full);
            prop_assert_eq!(&reduced, &eval(&f, &env).unwrap());
        }
    }
}
