use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::linalg::{solve_sparse, stationary_exact, stationary_float, visits_float, SparseRow};
use super::space::StateSpace;
use crate::crn::State;
use crate::rational::{format_rational, to_f64, Rational};

/// How the long-run distribution was obtained, from most to least exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Every bottom component is a single absorbing state.
    ExactAbsorption,
    /// Some bottom component needed an exact stationary solve.
    ExactStationary,
    /// Exact absorption masses outgrew the size budget and were recomputed
    /// in floating point.
    FloatAbsorption,
    /// Some bottom component was too large and was solved iteratively.
    FloatStationary,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExactAbsorption => "exact-rational-absorption",
            Method::ExactStationary => "exact-rational-stationary",
            Method::FloatAbsorption => "float-absorption",
            Method::FloatStationary => "float-stationary",
        }
    }
}

/// A probability, exact unless the exact computation was abandoned.
#[derive(Debug, Clone, PartialEq)]
pub enum Mass {
    Exact(Rational),
    Float(f64),
}

impl Mass {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Mass::Exact(r) => Some(r),
            Mass::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Mass::Exact(r) => to_f64(r),
            Mass::Float(x) => *x,
        }
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mass::Exact(r) => f.write_str(&format_rational(r)),
            Mass::Float(x) => write!(f, "{x:.16e}"),
        }
    }
}

/// Long-run probability of each state with positive mass.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Exact(Vec<(State, Rational)>),
    Float(Vec<(State, f64)>),
}

impl Distribution {
    pub fn exact(&self) -> Option<&[(State, Rational)]> {
        match self {
            Distribution::Exact(d) => Some(d),
            Distribution::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<(State, f64)> {
        match self {
            Distribution::Exact(d) => d.iter().map(|(s, p)| (s.clone(), to_f64(p))).collect(),
            Distribution::Float(d) => d.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Distribution::Exact(d) => d.len(),
            Distribution::Float(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyReport {
    pub distribution: Distribution,
    /// Bottom strongly connected components, as sorted state indices.
    pub bsccs: Vec<Vec<usize>>,
    /// Probability of ending up in each bottom component.
    pub absorption: Vec<Mass>,
    pub method: Method,
    /// Largest residual among float computations; 0 on exact paths.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyOptions {
    /// Bottom components up to this many states are solved exactly.
    pub exact_limit: usize,
    /// Absorption is recomputed in floating point once some exact mass
    /// needs more than this many bits (numerator plus denominator).
    pub exact_bits: u64,
    pub float_tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        SteadyOptions {
            exact_limit: 2000,
            exact_bits: 1 << 12,
            float_tolerance: 1e-12,
            max_sweeps: 1_000_000,
        }
    }
}

/// Strongly connected components in topological order of the condensation
/// (every edge goes from an earlier component to the same or a later one).
pub(crate) fn sccs(sp: &StateSpace) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(sp.len(), sp.transition_count());
    for _ in 0..sp.len() {
        g.add_node(());
    }
    for (i, j, _) in sp.transitions() {
        g.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.reverse();
    comps
}

/// Components that no transition leaves, ordered by smallest state index.
pub fn bsccs(sp: &StateSpace) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = sccs(sp)
        .into_iter()
        .filter(|c| is_bottom(sp, c))
        .collect();
    out.sort();
    out
}

fn is_bottom(sp: &StateSpace, comp: &[usize]) -> bool {
    comp.iter()
        .all(|&i| sp.successors[i].iter().all(|(j, _)| comp.binary_search(j).is_ok()))
}

pub fn steady_state(sp: &StateSpace) -> SteadyReport {
    steady_state_with(sp, &SteadyOptions::default())
}

/// Long-run distribution from the initial state: absorption probabilities
/// into each bottom component, times the stationary distribution inside it.
/// Everything is exact unless a size limit in `opts` is hit.
pub fn steady_state_with(sp: &StateSpace, opts: &SteadyOptions) -> SteadyReport {
    let comps = sccs(sp);
    let mut comp_of = vec![0usize; sp.len()];
    for (c, states) in comps.iter().enumerate() {
        for &i in states {
            comp_of[i] = c;
        }
    }
    let mut method = Method::ExactAbsorption;
    let mut residual = 0.0f64;
    let bottoms: Vec<(usize, Mass)> = match absorb_exact(sp, &comps, &comp_of, opts.exact_bits) {
        Some(b) => b.into_iter().map(|(c, m)| (c, Mass::Exact(m))).collect(),
        None => {
            method = Method::FloatAbsorption;
            let (b, res) = absorb_float(sp, &comps, &comp_of, opts);
            residual = res;
            b.into_iter().map(|(c, m)| (c, Mass::Float(m))).collect()
        }
    };

    let mut report_bsccs = Vec::with_capacity(bottoms.len());
    let mut absorption = Vec::with_capacity(bottoms.len());
    let mut exact: Vec<(State, Rational)> = Vec::new();
    let mut float: Vec<(State, f64)> = Vec::new();
    for (c, m) in bottoms {
        let states = &comps[c];
        if let [i] = states[..] {
            float.push((sp.states[i].clone(), m.to_f64()));
            if let Mass::Exact(p) = &m {
                exact.push((sp.states[i].clone(), p.clone()));
            }
        } else {
            let local = local_edges(sp, states);
            if states.len() <= opts.exact_limit {
                method = method.max(Method::ExactStationary);
                let pi = stationary_exact(&local);
                for (&i, p) in states.iter().zip(pi) {
                    float.push((sp.states[i].clone(), m.to_f64() * to_f64(&p)));
                    if let Mass::Exact(m) = &m {
                        exact.push((sp.states[i].clone(), m * p));
                    }
                }
            } else {
                method = Method::FloatStationary;
                let local_f: Vec<Vec<(usize, f64)>> = local
                    .iter()
                    .map(|e| e.iter().map(|(j, r)| (*j, to_f64(r))).collect())
                    .collect();
                let (pi, res) = stationary_float(&local_f, opts.float_tolerance, opts.max_sweeps);
                residual = residual.max(res);
                for (&i, p) in states.iter().zip(pi) {
                    float.push((sp.states[i].clone(), m.to_f64() * p));
                }
            }
        }
        report_bsccs.push(states.clone());
        absorption.push(m);
    }
    let distribution = if method >= Method::FloatAbsorption {
        float.sort_by(|a, b| a.0.cmp(&b.0));
        Distribution::Float(float)
    } else {
        exact.sort_by(|a, b| a.0.cmp(&b.0));
        Distribution::Exact(exact)
    };
    let mut order: Vec<usize> = (0..report_bsccs.len()).collect();
    order.sort_by(|&a, &b| report_bsccs[a].cmp(&report_bsccs[b]));
    SteadyReport {
        distribution,
        bsccs: order.iter().map(|&k| report_bsccs[k].clone()).collect(),
        absorption: order.iter().map(|&k| absorption[k].clone()).collect(),
        method,
        residual,
    }
}

fn bits(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Pushes the initial unit mass through the transient components in
/// topological order. Gives up when a mass exceeds `max_bits`.
fn absorb_exact(
    sp: &StateSpace,
    comps: &[Vec<usize>],
    comp_of: &[usize],
    max_bits: u64,
) -> Option<Vec<(usize, Rational)>> {
    let mut mass: Vec<Rational> = vec![Rational::zero(); sp.len()];
    mass[sp.initial] = Rational::one();
    let mut bottoms = Vec::new();
    for (c, states) in comps.iter().enumerate() {
        let entering: Rational = states.iter().fold(Rational::zero(), |acc, &i| acc + &mass[i]);
        if entering.is_zero() {
            continue;
        }
        if is_bottom(sp, states) {
            bottoms.push((c, entering));
            continue;
        }
        if let [i] = states[..] {
            let m = std::mem::take(&mut mass[i]);
            let exit = sp.exit_rate(i);
            for (j, rate) in &sp.successors[i] {
                mass[*j] += &m * rate / &exit;
            }
        } else {
            push_through(sp, states, comp_of, c, &mut mass);
        }
        let mut targets = states.iter().flat_map(|&i| &sp.successors[i]);
        if targets.any(|(j, _)| bits(&mass[*j]) > max_bits) {
            return None;
        }
    }
    Some(bottoms)
}

fn absorb_float(
    sp: &StateSpace,
    comps: &[Vec<usize>],
    comp_of: &[usize],
    opts: &SteadyOptions,
) -> (Vec<(usize, f64)>, f64) {
    let mut mass = vec![0.0f64; sp.len()];
    mass[sp.initial] = 1.0;
    let mut bottoms = Vec::new();
    let mut residual = 0.0f64;
    for (c, states) in comps.iter().enumerate() {
        let entering: f64 = states.iter().map(|&i| mass[i]).sum();
        if entering == 0.0 {
            continue;
        }
        if is_bottom(sp, states) {
            bottoms.push((c, entering));
            continue;
        }
        let exits: Vec<f64> = states.iter().map(|&i| to_f64(&sp.exit_rate(i))).collect();
        let visits = if let [i] = states[..] {
            vec![std::mem::take(&mut mass[i])]
        } else {
            let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); states.len()];
            for (a, &i) in states.iter().enumerate() {
                for (j, rate) in &sp.successors[i] {
                    if comp_of[*j] == c {
                        let b = states.binary_search(j).expect("same component");
                        incoming[b].push((a, to_f64(rate) / exits[a]));
                    }
                }
            }
            let entry: Vec<f64> = states.iter().map(|&i| std::mem::take(&mut mass[i])).collect();
            let (v, change) = visits_float(&incoming, &entry, opts.float_tolerance, opts.max_sweeps);
            residual = residual.max(change);
            v
        };
        for (a, &i) in states.iter().enumerate() {
            for (j, rate) in &sp.successors[i] {
                if comp_of[*j] != c {
                    mass[*j] += visits[a] * to_f64(rate) / exits[a];
                }
            }
        }
    }
    let total: f64 = bottoms.iter().map(|(_, m)| m).sum();
    (bottoms, residual.max((1.0 - total).abs()))
}

/// Transitions inside a component, reindexed to positions in `states`.
fn local_edges(sp: &StateSpace, states: &[usize]) -> Vec<Vec<(usize, Rational)>> {
    states
        .iter()
        .map(|&i| {
            sp.successors[i]
                .iter()
                .filter_map(|(j, r)| states.binary_search(j).ok().map(|k| (k, r.clone())))
                .collect()
        })
        .collect()
}

/// Moves the mass sitting in a transient component to the states it exits
/// into, using expected visit counts of the embedded jump chain.
fn push_through(sp: &StateSpace, states: &[usize], comp_of: &[usize], comp: usize, mass: &mut [Rational]) {
    let n = states.len();
    let exits: Vec<Rational> = states.iter().map(|&i| sp.exit_rate(i)).collect();
    // Visits v satisfy v_k - Σ_i v_i P(i→k) = entry_k within the component.
    let mut rows: Vec<SparseRow> = (0..n).map(|k| SparseRow::from([(k, Rational::one())])).collect();
    for (a, &i) in states.iter().enumerate() {
        for (j, rate) in &sp.successors[i] {
            if comp_of[*j] == comp {
                let b = states.binary_search(j).expect("same component");
                let e = rows[b].entry(a).or_insert_with(Rational::zero);
                *e -= rate / &exits[a];
            }
        }
    }
    let entry: Vec<Rational> = states.iter().map(|&i| std::mem::take(&mut mass[i])).collect();
    let visits = solve_sparse(rows, entry).expect("transient component has finite visit counts");
    for (a, &i) in states.iter().enumerate() {
        for (j, rate) in &sp.successors[i] {
            if comp_of[*j] != comp {
                mass[*j] += &visits[a] * rate / &exits[a];
            }
        }
    }
}

/// Marginal of one species under a float distribution.
pub fn marginal_f64(dist: &[(State, f64)], species: usize) -> BTreeMap<u64, f64> {
    let mut out = BTreeMap::new();
    for (x, p) in dist {
        *out.entry(x.0[species]).or_insert(0.0) += p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::explore;
    use crate::crn::tests::{example_one, uniform};
    use crate::crn::Crs;
    use crate::pmf::Pmf;
    use crate::rational::{int, rat};

    fn out_marginal(c: &Crs, r: &SteadyReport, name: &str) -> Pmf {
        let id = c.species_id(name).unwrap();
        c.marginal(r.distribution.exact().unwrap().iter().map(|(s, p)| (s, p)), id).unwrap()
    }

    #[test]
    fn example_one_exact() {
        let c = example_one();
        let sp = explore(&c, 1000).unwrap();
        let r = steady_state(&sp);
        assert_eq!(r.method, Method::ExactAbsorption);
        assert_eq!(r.bsccs.len(), 3);
        assert!(r.bsccs.iter().all(|b| b.len() == 1));
        assert_eq!(
            out_marginal(&c, &r, "out"),
            Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))]).unwrap()
        );
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn uniform_three() {
        let c = uniform(3, 0);
        let r = steady_state(&explore(&c, 100).unwrap());
        assert_eq!(r.method, Method::ExactStationary);
        assert_eq!(r.bsccs, vec![vec![0, 1, 2, 3]]);
        for (_, p) in r.distribution.exact().unwrap() {
            assert_eq!(*p, rat(1, 4));
        }
    }

    #[test]
    fn no_reactions_is_point_mass() {
        let mut c = Crs::new();
        c.add_species("a", 2).unwrap();
        let r = steady_state(&explore(&c, 10).unwrap());
        assert_eq!(r.distribution, Distribution::Exact(vec![(State(vec![2]), int(1))]));
    }

    #[test]
    fn float_path_matches_exact() {
        let c = uniform(10, 0);
        let sp = explore(&c, 100).unwrap();
        let opts = SteadyOptions { exact_limit: 0, ..SteadyOptions::default() };
        let r = steady_state_with(&sp, &opts);
        assert_eq!(r.method, Method::FloatStationary);
        assert!(r.residual <= 1e-12);
        for (_, p) in r.distribution.to_f64() {
            assert!((p - 1.0 / 11.0).abs() < 1e-10);
        }
    }

    #[test]
    fn transient_cycle_then_absorb() {
        // a <-> b, b -> c: the cycle is transient, everything ends in c.
        let mut c = Crs::new();
        for s in ["a", "b", "c", "d"] {
            c.add_species(s, u64::from(s == "a")).unwrap();
        }
        c.add_reaction(&[("a", 1)], &[("b", 1)], int(1)).unwrap();
        c.add_reaction(&[("b", 1)], &[("a", 1)], int(2)).unwrap();
        c.add_reaction(&[("b", 1)], &[("c", 1)], int(1)).unwrap();
        c.add_reaction(&[("a", 1)], &[("d", 1)], int(1)).unwrap();
        let r = steady_state(&explore(&c, 10).unwrap());
        // From a: 1/2 to d, 1/2 to b; from b: 2/3 back to a, 1/3 to c.
        // P(c) = (1/2)(1/3) / (1 - (1/2)(2/3)) = 1/4.
        assert_eq!(out_marginal(&c, &r, "c").prob1(1), rat(1, 4));
        assert_eq!(r.absorption.iter().fold(Rational::zero(), |a, b| a + b.exact().unwrap()), int(1));
    }

    #[test]
    fn multiple_bottom_cycles() {
        // z picks one of two binary switches; each switch is an irreducible cycle.
        let mut c = Crs::new();
        for s in ["z", "a", "b", "x", "y"] {
            c.add_species(s, u64::from(s == "z")).unwrap();
        }
        c.add_reaction(&[("z", 1)], &[("a", 1)], int(1)).unwrap();
        c.add_reaction(&[("z", 1)], &[("x", 1)], int(3)).unwrap();
        c.add_reaction(&[("a", 1)], &[("b", 1)], int(1)).unwrap();
        c.add_reaction(&[("b", 1)], &[("a", 1)], int(1)).unwrap();
        c.add_reaction(&[("x", 1)], &[("y", 1)], int(1)).unwrap();
        c.add_reaction(&[("y", 1)], &[("x", 1)], int(2)).unwrap();
        let r = steady_state(&explore(&c, 10).unwrap());
        assert_eq!(r.bsccs.len(), 2);
        assert_eq!(out_marginal(&c, &r, "a").prob1(1), rat(1, 8));
        assert_eq!(out_marginal(&c, &r, "y").prob1(1), rat(1, 4));
    }

    #[test]
    fn size_budget_switches_to_float_absorption() {
        let c = example_one();
        let sp = explore(&c, 1000).unwrap();
        let exact = steady_state(&sp);
        let r = steady_state_with(&sp, &SteadyOptions { exact_bits: 2, ..SteadyOptions::default() });
        assert_eq!(r.method, Method::FloatAbsorption);
        assert!(r.distribution.exact().is_none());
        assert!(r.residual < 1e-12);
        for (a, b) in r.absorption.iter().zip(&exact.absorption) {
            assert!(a.exact().is_none());
            assert!((a.to_f64() - b.to_f64()).abs() < 1e-15);
        }
        assert_eq!(exact.absorption[0].to_string(), "1/6");
    }
}
