//! Reaction networks with initial state (CRS), mass-action propensities,
//! the non-reacting-output check, renaming, and the text format.

mod propensity;
mod text;

use std::collections::HashMap;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::pmf::Pmf;
use crate::rational::Rational;
use crate::TextError;

pub(crate) use propensity::can_fire;
pub use propensity::{propensity, propensity_f64, propensity_with, Convention};
pub use text::{format_crn, parse_crn, CrnDocument};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrnError {
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("species `{0}` is already declared")]
    NotFresh(String),
    #[error("invalid species name `{0}`")]
    InvalidName(String),
    #[error("reaction rate {0} is not positive")]
    NonPositiveRate(Rational),
    #[error("reaction {0} is not enabled in this state")]
    NotEnabled(usize),
    #[error("state has {got} components, network has {expected} species")]
    StateLength { got: usize, expected: usize },
    #[error("distribution sums to {0}, not 1")]
    NotNormalized(Rational),
    #[error(transparent)]
    Text(#[from] TextError),
}

/// A multiset of species, kept sorted by species index with no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Complex(Vec<(usize, u64)>);

impl Complex {
    pub fn new(terms: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut merged: Vec<(usize, u64)> = Vec::new();
        for (s, n) in terms {
            if n == 0 {
                continue;
            }
            match merged.iter_mut().find(|(t, _)| *t == s) {
                Some(slot) => slot.1 += n,
                None => merged.push((s, n)),
            }
        }
        merged.sort_unstable();
        Complex(merged)
    }

    pub fn empty() -> Self {
        Complex(Vec::new())
    }

    pub fn terms(&self) -> &[(usize, u64)] {
        &self.0
    }

    pub fn count(&self, species: usize) -> u64 {
        self.0
            .iter()
            .find(|(s, _)| *s == species)
            .map_or(0, |(_, n)| *n)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn remap(&self, f: impl Fn(usize) -> usize) -> Complex {
        Complex::new(self.0.iter().map(|&(s, n)| (f(s), n)))
    }
}

/// `source →(rate) product`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub source: Complex,
    pub product: Complex,
    pub rate: Rational,
}

impl Reaction {
    /// Net change `product − source` per species, nonzero entries only.
    pub fn net_change(&self) -> Vec<(usize, i64)> {
        let mut delta: Vec<(usize, i64)> = Vec::new();
        for &(s, n) in self.product.terms() {
            delta.push((s, n as i64));
        }
        for &(s, n) in self.source.terms() {
            match delta.iter_mut().find(|(t, _)| *t == s) {
                Some(slot) => slot.1 -= n as i64,
                None => delta.push((s, -(n as i64))),
            }
        }
        delta.retain(|(_, d)| *d != 0);
        delta.sort_unstable();
        delta
    }
}

/// Molecule counts indexed by species order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<u64>);

impl State {
    pub fn counts(&self) -> &[u64] {
        &self.0
    }
}

/// A reaction network with an initial state and a set of output species.
#[derive(Clone, PartialEq, Eq)]
pub struct Crs {
    species: Vec<String>,
    index: HashMap<String, usize>,
    reactions: Vec<Reaction>,
    initial: Vec<u64>,
    outputs: Vec<usize>,
    composable: bool,
}

impl Default for Crs {
    fn default() -> Self {
        Crs::new()
    }
}

pub fn valid_species_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

impl Crs {
    pub fn new() -> Self {
        Crs {
            species: Vec::new(),
            index: HashMap::new(),
            reactions: Vec::new(),
            initial: Vec::new(),
            outputs: Vec::new(),
            composable: true,
        }
    }

    /// Declares a species with its initial count and returns its index.
    pub fn add_species(&mut self, name: &str, initial: u64) -> Result<usize, CrnError> {
        if !valid_species_name(name) {
            return Err(CrnError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(CrnError::NotFresh(name.to_string()));
        }
        let id = self.species.len();
        self.species.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.initial.push(initial);
        Ok(id)
    }

    pub fn species_id(&self, name: &str) -> Result<usize, CrnError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| CrnError::UnknownSpecies(name.to_string()))
    }

    pub fn has_species(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn species_name(&self, id: usize) -> &str {
        &self.species[id]
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn initial_state(&self) -> State {
        State(self.initial.clone())
    }

    pub fn initial_count(&self, name: &str) -> Result<u64, CrnError> {
        Ok(self.initial[self.species_id(name)?])
    }

    pub fn set_initial(&mut self, name: &str, count: u64) -> Result<(), CrnError> {
        let id = self.species_id(name)?;
        self.initial[id] = count;
        Ok(())
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|&i| self.species[i].as_str()).collect()
    }

    pub fn add_output(&mut self, name: &str) -> Result<(), CrnError> {
        let id = self.species_id(name)?;
        if !self.outputs.contains(&id) {
            self.outputs.push(id);
        }
        Ok(())
    }

    pub(crate) fn clear_outputs(&mut self) {
        self.outputs.clear();
    }

    /// False for networks that must not be fed to the composition operators.
    pub fn composable(&self) -> bool {
        self.composable
    }

    pub fn set_composable(&mut self, composable: bool) {
        self.composable = composable;
    }

    /// Adds a reaction given by species names and stoichiometries.
    pub fn add_reaction(
        &mut self,
        source: &[(&str, u64)],
        product: &[(&str, u64)],
        rate: Rational,
    ) -> Result<usize, CrnError> {
        let resolve = |side: &[(&str, u64)]| -> Result<Complex, CrnError> {
            Ok(Complex::new(
                side.iter()
                    .map(|&(name, n)| Ok((self.species_id(name)?, n)))
                    .collect::<Result<Vec<_>, CrnError>>()?,
            ))
        };
        let reaction = Reaction {
            source: resolve(source)?,
            product: resolve(product)?,
            rate,
        };
        self.push_reaction(reaction)
    }

    pub fn push_reaction(&mut self, reaction: Reaction) -> Result<usize, CrnError> {
        if !reaction.rate.is_positive() {
            return Err(CrnError::NonPositiveRate(reaction.rate));
        }
        let n = self.species.len();
        for &(s, _) in reaction.source.terms().iter().chain(reaction.product.terms()) {
            if s >= n {
                return Err(CrnError::UnknownSpecies(format!("#{s}")));
            }
        }
        self.reactions.push(reaction);
        Ok(self.reactions.len() - 1)
    }

    /// Mass-action propensity of reaction `r` (falling-factorial convention).
    pub fn propensity(&self, r: usize, x: &State) -> Rational {
        propensity(&self.reactions[r], x)
    }

    /// Indices of reactions with positive propensity in `x`.
    pub fn enabled(&self, x: &State) -> Vec<usize> {
        (0..self.reactions.len())
            .filter(|&r| propensity::can_fire(&self.reactions[r], x))
            .collect()
    }

    /// Fires reaction `r` in state `x`.
    pub fn apply(&self, r: usize, x: &State) -> Result<State, CrnError> {
        if x.0.len() != self.species.len() {
            return Err(CrnError::StateLength {
                got: x.0.len(),
                expected: self.species.len(),
            });
        }
        let reaction = &self.reactions[r];
        if !propensity::can_fire(reaction, x) {
            return Err(CrnError::NotEnabled(r));
        }
        let mut next = x.0.clone();
        for &(s, n) in reaction.source.terms() {
            next[s] -= n;
        }
        for &(s, n) in reaction.product.terms() {
            next[s] += n;
        }
        Ok(State(next))
    }

    /// First `(output species, reaction)` pair where an output species is
    /// consumed, or `None` if the network is non-reacting-output.
    pub fn nro_violation(&self) -> Option<(usize, usize)> {
        for (r, reaction) in self.reactions.iter().enumerate() {
            for &(s, _) in reaction.source.terms() {
                if self.outputs.contains(&s) {
                    return Some((s, r));
                }
            }
        }
        None
    }

    pub fn is_nro(&self) -> bool {
        self.nro_violation().is_none()
    }

    /// Replaces species `old` by the undeclared name `fresh` everywhere,
    /// keeping its index, initial count and output status.
    pub fn rename(&self, fresh: &str, old: &str) -> Result<Crs, CrnError> {
        let id = self.species_id(old)?;
        if self.index.contains_key(fresh) {
            return Err(CrnError::NotFresh(fresh.to_string()));
        }
        if !valid_species_name(fresh) {
            return Err(CrnError::InvalidName(fresh.to_string()));
        }
        let mut out = self.clone();
        out.index.remove(old);
        out.index.insert(fresh.to_string(), id);
        out.species[id] = fresh.to_string();
        Ok(out)
    }

    /// Every species name prefixed with `prefix`; an injective renaming.
    pub fn prefixed(&self, prefix: &str) -> Crs {
        let mut out = self.clone();
        out.species = self.species.iter().map(|s| format!("{prefix}{s}")).collect();
        out.index = out
            .species
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        out
    }

    /// Disjoint union: `other`'s species are appended after `self`'s. Names
    /// must not collide. Outputs of both sides are dropped.
    pub(crate) fn absorb(&mut self, other: &Crs) -> Result<Vec<usize>, CrnError> {
        let mut map = Vec::with_capacity(other.species.len());
        for (name, &init) in other.species.iter().zip(&other.initial) {
            map.push(self.add_species(name, init)?);
        }
        for reaction in &other.reactions {
            self.reactions.push(Reaction {
                source: reaction.source.remap(|s| map[s]),
                product: reaction.product.remap(|s| map[s]),
                rate: reaction.rate.clone(),
            });
        }
        self.outputs.clear();
        Ok(map)
    }

    /// Marginal pmf of one species under a distribution over states.
    pub fn marginal<'a>(
        &self,
        dist: impl IntoIterator<Item = (&'a State, &'a Rational)>,
        species: usize,
    ) -> Result<Pmf, CrnError> {
        self.joint_marginal(dist, &[species])
    }

    /// Joint pmf of several species under a distribution over states.
    pub fn joint_marginal<'a>(
        &self,
        dist: impl IntoIterator<Item = (&'a State, &'a Rational)>,
        species: &[usize],
    ) -> Result<Pmf, CrnError> {
        marginal(dist, species)
    }
}

/// `π_λ(k) = Σ_{x : x(λ) = k} π(x)`, over the listed species jointly.
pub fn marginal<'a>(
    dist: impl IntoIterator<Item = (&'a State, &'a Rational)>,
    species: &[usize],
) -> Result<Pmf, CrnError> {
    let mut acc: std::collections::BTreeMap<Vec<u64>, Rational> = Default::default();
    let mut total = Rational::zero();
    for (x, p) in dist {
        let key: Vec<u64> = species.iter().map(|&s| x.0[s]).collect();
        total += p;
        *acc.entry(key).or_insert_with(Rational::zero) += p;
    }
    if !total.is_one() {
        return Err(CrnError::NotNormalized(total));
    }
    Ok(Pmf::new(species.len(), acc).expect("marginal of a normalized distribution"))
}

impl fmt::Debug for Crs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_crn(self, &[]))
    }
}
