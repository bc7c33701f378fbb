//! Gillespie direct-method simulation.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), a portable
//! stream cipher whose output is identical on every platform. Trial `i` of a
//! run with seed `s` uses the generator seeded with `s` and switched to
//! stream `i`, so results do not depend on scheduling or thread count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::AnalysisError;
use crate::crn::{propensity_f64, Convention, Crs};
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StopReason {
    /// No reaction is enabled.
    Quiescent,
    TimeCap,
    StepCap,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Quiescent => "quiescent",
            StopReason::TimeCap => "timeCap",
            StopReason::StepCap => "stepCap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsaOptions {
    pub trials: u64,
    pub seed: u64,
    pub t_max: f64,
    pub step_cap: u64,
    /// Worker threads; 0 or 1 runs sequentially.
    pub threads: usize,
    pub convention: Convention,
}

impl Default for SsaOptions {
    fn default() -> Self {
        SsaOptions {
            trials: 1000,
            seed: 0,
            t_max: f64::INFINITY,
            step_cap: 10_000_000,
            threads: 1,
            convention: Convention::Literal,
        }
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub stop: StopReason,
    pub time: f64,
    pub steps: u64,
    /// Final counts of the output species, in output order.
    pub outputs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats {
    pub trials: u64,
    pub seed: u64,
    pub species: Vec<String>,
    /// Final-count histogram per output species, in output order.
    pub histograms: Vec<BTreeMap<u64, u64>>,
    pub runs: Vec<Trial>,
}

impl TrajectoryStats {
    pub fn histogram(&self, species: &str) -> Option<&BTreeMap<u64, u64>> {
        self.species.iter().position(|s| s == species).map(|i| &self.histograms[i])
    }

    pub fn stop_counts(&self) -> BTreeMap<StopReason, u64> {
        let mut out = BTreeMap::new();
        for t in &self.runs {
            *out.entry(t.stop).or_insert(0) += 1;
        }
        out
    }
}

/// Rates and stoichiometry pre-converted for the inner loop.
struct Compiled<'a> {
    crs: &'a Crs,
    rates: Vec<f64>,
    deltas: Vec<Vec<(usize, i64)>>,
    convention: Convention,
}

impl<'a> Compiled<'a> {
    fn new(crs: &'a Crs, convention: Convention) -> Self {
        Compiled {
            crs,
            rates: crs.reactions().iter().map(|r| to_f64(&r.rate)).collect(),
            deltas: crs.reactions().iter().map(|r| r.net_change()).collect(),
            convention,
        }
    }

    fn propensities(&self, x: &[u64], a: &mut [f64]) -> f64 {
        let mut total = 0.0;
        for (k, r) in self.crs.reactions().iter().enumerate() {
            a[k] = propensity_f64(r, self.rates[k], x, self.convention);
            total += a[k];
        }
        total
    }

    fn fire(&self, k: usize, x: &mut [u64]) {
        for &(s, d) in &self.deltas[k] {
            x[s] = x[s].checked_add_signed(d).expect("counts stay non-negative");
        }
    }

    /// Index of the reaction selected by `u ∈ [0, total)`.
    fn pick(a: &[f64], u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (k, &ak) in a.iter().enumerate() {
            if ak > 0.0 {
                acc += ak;
                last = k;
                if u < acc {
                    return k;
                }
            }
        }
        last
    }
}

fn exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_one(net: &Compiled, opts: &SsaOptions, index: u64) -> Trial {
    let mut rng = trial_rng(opts.seed, index);
    let mut x = net.crs.initial_state().0;
    let mut a = vec![0.0; net.rates.len()];
    let mut time = 0.0;
    let mut steps = 0;
    let stop = loop {
        let total = net.propensities(&x, &mut a);
        if total <= 0.0 {
            break StopReason::Quiescent;
        }
        if steps >= opts.step_cap {
            break StopReason::StepCap;
        }
        let dt = exponential(&mut rng, total);
        if time + dt > opts.t_max {
            time = opts.t_max;
            break StopReason::TimeCap;
        }
        time += dt;
        let u: f64 = rng.random::<f64>() * total;
        net.fire(Compiled::pick(&a, u), &mut x);
        steps += 1;
    };
    Trial {
        stop,
        time,
        steps,
        outputs: net.crs.outputs().iter().map(|&s| x[s]).collect(),
    }
}

/// Runs independent trajectories from the initial state and records the
/// final output counts.
pub fn ssa_run(crs: &Crs, opts: &SsaOptions) -> Result<TrajectoryStats, AnalysisError> {
    if opts.trials == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let net = Compiled::new(crs, opts.convention);
    let runs: Vec<Trial> = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| AnalysisError::Threads(e.to_string()))?;
        pool.install(|| (0..opts.trials).into_par_iter().map(|i| run_one(&net, opts, i)).collect())
    } else {
        (0..opts.trials).map(|i| run_one(&net, opts, i)).collect()
    };
    let mut histograms = vec![BTreeMap::new(); crs.outputs().len()];
    for t in &runs {
        for (h, &v) in histograms.iter_mut().zip(&t.outputs) {
            *h.entry(v).or_insert(0u64) += 1;
        }
    }
    Ok(TrajectoryStats {
        trials: opts.trials,
        seed: opts.seed,
        species: crs.output_names().iter().map(|s| s.to_string()).collect(),
        histograms,
        runs,
    })
}

/// Long-run time-weighted distribution of one species along a single
/// trajectory, for networks that never quiesce.
#[derive(Debug, Clone, PartialEq)]
pub struct Occupation {
    /// Fraction of post-burn-in time spent at each count.
    pub distribution: BTreeMap<u64, f64>,
    pub jumps: u64,
    pub burn_in_jumps: u64,
    pub observed_time: f64,
}

/// Simulates `jumps` reaction events, discards the first `burn_in` fraction
/// of them, and reports how long `species` spent at each count afterwards.
pub fn occupation_time(
    crs: &Crs,
    species: &str,
    seed: u64,
    jumps: u64,
    burn_in: f64,
) -> Result<Occupation, AnalysisError> {
    let s = crs
        .species_id(species)
        .map_err(|_| AnalysisError::UnknownSpecies(species.to_string()))?;
    if !(0.0..1.0).contains(&burn_in) {
        return Err(AnalysisError::BurnIn(burn_in));
    }
    let net = Compiled::new(crs, Convention::Literal);
    let mut rng = trial_rng(seed, 0);
    let mut x = crs.initial_state().0;
    let mut a = vec![0.0; net.rates.len()];
    let burn = (jumps as f64 * burn_in).floor() as u64;
    let mut weights: BTreeMap<u64, f64> = BTreeMap::new();
    let mut observed = 0.0;
    let mut done = 0;
    while done < jumps {
        let total = net.propensities(&x, &mut a);
        if total <= 0.0 {
            return Err(AnalysisError::Quiescent(done));
        }
        let dt = exponential(&mut rng, total);
        if done >= burn {
            *weights.entry(x[s]).or_insert(0.0) += dt;
            observed += dt;
        }
        let u: f64 = rng.random::<f64>() * total;
        net.fire(Compiled::pick(&a, u), &mut x);
        done += 1;
    }
    for w in weights.values_mut() {
        *w /= observed;
    }
    Ok(Occupation {
        distribution: weights,
        jumps,
        burn_in_jumps: burn,
        observed_time: observed,
    })
}
