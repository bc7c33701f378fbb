use std::collections::{BTreeMap, HashMap, VecDeque};

use num::Zero;

use super::AnalysisError;
use crate::crn::{can_fire, propensity_with, Convention, Crs, State};
use crate::rational::Rational;

/// Reachable states of a network and the rates between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    /// States in discovery order; index 0 is the initial state.
    pub states: Vec<State>,
    /// Outgoing transitions per state, sorted by target. Self-loops are
    /// dropped and parallel reactions to the same target are summed.
    pub successors: Vec<Vec<(usize, Rational)>>,
    pub initial: usize,
    pub cap: usize,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Every transition as `(from, to, rate)`.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(i, out)| out.iter().map(move |(j, r)| (i, *j, r)))
    }

    pub fn transition_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    /// Total exit rate of a state.
    pub fn exit_rate(&self, i: usize) -> Rational {
        self.successors[i]
            .iter()
            .fold(Rational::zero(), |acc, (_, r)| acc + r)
    }

    pub fn index_of(&self, x: &State) -> Option<usize> {
        self.states.iter().position(|s| s == x)
    }

    /// True when every state without outgoing transitions also has no
    /// enabled reaction in `crs`.
    pub fn all_bottoms_quiescent(&self, crs: &Crs) -> bool {
        self.successors
            .iter()
            .zip(&self.states)
            .filter(|(out, _)| out.is_empty())
            .all(|(_, x)| crs.enabled(x).is_empty())
    }
}

/// Breadth-first closure of the initial state. Successors of each state are
/// queued in lexicographic order, so the numbering is reproducible.
pub fn explore(crs: &Crs, cap: usize) -> Result<StateSpace, AnalysisError> {
    explore_with(crs, cap, Convention::Literal)
}

pub fn explore_with(crs: &Crs, cap: usize, convention: Convention) -> Result<StateSpace, AnalysisError> {
    closure_bfs(crs, cap, convention, false)
}

/// Reactions that can be fired eagerly without changing where the chain
/// absorbs, in firing order.
///
/// A reaction qualifies when it consumes at least one species, no other
/// reaction decreases any of its reactants, and every species it changes is
/// a reactant only of itself or of reactions that already qualify. Such a
/// reaction never competes with anything and only feeds other qualifying
/// reactions, so the remaining reactions evolve as if it did not exist and
/// its total number of firings is fixed by what they produce. Downstream
/// reactions are found first; firing in reverse discovery order therefore
/// reaches the eager closure in one pass.
pub fn eager_reactions(crs: &Crs) -> Vec<usize> {
    eager_among(crs, &vec![true; crs.reactions().len()])
}

/// [`eager_reactions`] for the sub-network of `live` reactions.
fn eager_among(crs: &Crs, live: &[bool]) -> Vec<usize> {
    let reactions = crs.reactions();
    let n = reactions.len();
    let deltas: Vec<Vec<(usize, i64)>> = reactions.iter().map(|r| r.net_change()).collect();
    let uncontested: Vec<bool> = (0..n)
        .map(|t| {
            reactions[t].source.terms().iter().all(|&(s, _)| {
                (0..n).all(|o| o == t || !live[o] || deltas[o].iter().all(|&(u, d)| u != s || d >= 0))
            })
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut is_chosen = vec![false; n];
    loop {
        let next = (0..n).find(|&t| {
            live[t]
                && !is_chosen[t]
                && uncontested[t]
                && deltas[t].iter().any(|&(_, d)| d < 0)
                && deltas[t].iter().all(|&(s, _)| {
                    (0..n).all(|o| o == t || !live[o] || is_chosen[o] || reactions[o].source.count(s) == 0)
                })
        });
        match next {
            Some(t) => {
                is_chosen[t] = true;
                chosen.push(t);
            }
            None => break,
        }
    }
    chosen.reverse();
    chosen
}

/// Reactions that may still fire from `x`: those whose reactants are present
/// or producible by other such reactions. The rest are dead for good.
fn live_reactions(crs: &Crs, x: &[u64]) -> Vec<bool> {
    let reactions = crs.reactions();
    let mut available: Vec<bool> = x.iter().map(|&n| n > 0).collect();
    let mut live = vec![false; reactions.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (t, r) in reactions.iter().enumerate() {
            if !live[t] && r.source.terms().iter().all(|&(s, _)| available[s]) {
                live[t] = true;
                changed = true;
                for &(s, _) in r.product.terms() {
                    available[s] = true;
                }
            }
        }
    }
    live
}

fn fire_eager(crs: &Crs, eager: &[usize], x: &mut [u64]) {
    for &t in eager {
        let reaction = &crs.reactions()[t];
        let delta = reaction.net_change();
        let mut times = u64::MAX;
        for &(s, need) in reaction.source.terms() {
            if x[s] < need {
                times = 0;
                break;
            }
            let used = delta.iter().find(|&&(u, _)| u == s).map_or(0, |&(_, n)| n);
            if used < 0 {
                times = times.min((x[s] - need) / used.unsigned_abs() + 1);
            }
        }
        if times == 0 {
            continue;
        }
        for &(s, n) in &delta {
            let change = n.unsigned_abs().checked_mul(times).expect("count overflow");
            x[s] = if n < 0 { x[s] - change } else { x[s].checked_add(change).expect("count overflow") };
        }
    }
}

/// Eager sets per live set, computed on demand.
struct Reducer<'a> {
    crs: &'a Crs,
    cache: HashMap<Vec<bool>, Vec<usize>>,
}

impl Reducer<'_> {
    /// Fires eager reactions until none is enabled, re-deriving the eager set
    /// as reactions die.
    fn close(&mut self, x: &mut [u64]) {
        loop {
            let live = live_reactions(self.crs, x);
            let crs = self.crs;
            let eager = self.cache.entry(live).or_insert_with_key(|l| eager_among(crs, l)).clone();
            let before = x.to_vec();
            fire_eager(self.crs, &eager, x);
            if before == x {
                return;
            }
        }
    }
}

/// Like [`explore`], but every state is first closed under eager reactions
/// (see [`eager_reactions`]), judged only among the reactions that can
/// still fire from that state. The absorbing distribution is unchanged
/// whenever the reduced chain ends in quiescent states; callers must check
/// that (see [`StateSpace::all_bottoms_quiescent`]) and fall back to
/// [`explore`] otherwise, since the reduction does not preserve time
/// averages.
pub fn explore_reduced(crs: &Crs, cap: usize) -> Result<StateSpace, AnalysisError> {
    closure_bfs(crs, cap, Convention::Literal, true)
}

fn closure_bfs(crs: &Crs, cap: usize, convention: Convention, reduce: bool) -> Result<StateSpace, AnalysisError> {
    if cap == 0 {
        return Err(AnalysisError::StateCapExceeded(cap));
    }
    let mut reducer = Reducer { crs, cache: HashMap::new() };
    let mut close = |x: &mut State| {
        if reduce {
            reducer.close(&mut x.0)
        }
    };
    let mut x0 = crs.initial_state();
    close(&mut x0);
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states = vec![x0.clone()];
    let mut successors: Vec<Vec<(usize, Rational)>> = Vec::new();
    index.insert(x0, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let x = states[i].clone();
        let mut out: BTreeMap<State, Rational> = BTreeMap::new();
        for (r, reaction) in crs.reactions().iter().enumerate() {
            if !can_fire(reaction, &x) {
                continue;
            }
            let mut y = crs.apply(r, &x).expect("enabled reaction fires");
            close(&mut y);
            if y == x {
                continue;
            }
            let a = propensity_with(reaction, &x, convention);
            *out.entry(y).or_insert_with(Rational::zero) += a;
        }
        let mut edges = Vec::with_capacity(out.len());
        for (y, a) in out {
            let j = match index.get(&y) {
                Some(&j) => j,
                None => {
                    let j = states.len();
                    if j >= cap {
                        return Err(AnalysisError::StateCapExceeded(cap));
                    }
                    index.insert(y.clone(), j);
                    states.push(y);
                    queue.push_back(j);
                    j
                }
            };
            edges.push((j, a));
        }
        edges.sort_by_key(|(j, _)| *j);
        successors.push(edges);
    }
    Ok(StateSpace {
        states,
        successors,
        initial: 0,
        cap,
    })
}
