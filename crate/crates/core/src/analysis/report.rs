//! Marginals, distances, and report serialization.
//!
//! The structured form is JSON. A steady-state report looks like
//!
//! ```json
//! {
//!   "method": "exact-rational-absorption",
//!   "states": 21,
//!   "residual": 0.0,
//!   "bsccs": [{"size": 1, "absorption": "1/6"}],
//!   "marginals": {"out": {"2": "1/6", "5": "1/3"}}
//! }
//! ```
//!
//! with marginal probabilities as `num/den` strings on exact paths and
//! numbers on float paths. Absorption is always a string: `num/den`, or a
//! 17-digit float once the solver has left exact arithmetic. A simulation report has `trials`, `seed`, a `stops`
//! object counting each stop reason, and `histograms` mapping each output
//! species to `{value: count}`.

use std::collections::BTreeMap;
use std::fmt::Write;

use num::{One, Zero};
use serde_json::{json, Map, Value};

use super::ssa::TrajectoryStats;
use super::steady::{marginal_f64, Distribution, SteadyReport};
use super::AnalysisError;
use crate::crn::{marginal, Crs};
use crate::pmf::Pmf;
use crate::rational::{format_rational, Rational};

/// Marginal of one output species.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    Exact(Pmf),
    Float(BTreeMap<u64, f64>),
}

impl Marginal {
    pub fn exact(&self) -> Option<&Pmf> {
        match self {
            Marginal::Exact(p) => Some(p),
            Marginal::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> BTreeMap<u64, f64> {
        match self {
            Marginal::Exact(p) => p.iter1().map(|(v, q)| (v, crate::rational::to_f64(q))).collect(),
            Marginal::Float(m) => m.clone(),
        }
    }
}

/// Marginal distribution of every output species, in output order.
pub fn output_marginals(crs: &Crs, report: &SteadyReport) -> Result<Vec<(String, Marginal)>, AnalysisError> {
    crs.outputs()
        .iter()
        .map(|&s| {
            let m = match &report.distribution {
                Distribution::Exact(d) => Marginal::Exact(marginal(d.iter().map(|(x, p)| (x, p)), &[s])?),
                Distribution::Float(d) => Marginal::Float(marginal_f64(d, s)),
            };
            Ok((crs.species_name(s).to_string(), m))
        })
        .collect()
}

/// Exact joint distribution of all output species.
pub fn joint_output(crs: &Crs, report: &SteadyReport) -> Result<Pmf, AnalysisError> {
    let d = report.distribution.exact().ok_or(AnalysisError::NotExact)?;
    Ok(marginal(d.iter().map(|(x, p)| (x, p)), crs.outputs())?)
}

/// Empirical pmf `count / trials` of a histogram.
pub fn empirical_pmf(histogram: &BTreeMap<u64, u64>) -> Result<Pmf, AnalysisError> {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return Err(AnalysisError::NoTrials);
    }
    let t = Rational::from_integer(total.into());
    Ok(Pmf::univariate(
        histogram
            .iter()
            .map(|(&v, &c)| (v, Rational::from_integer(c.into()) / &t)),
    )?)
}

/// Both closeness measures between two pmfs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub l1: Rational,
    /// Smallest `min(f, g)/max(f, g)` over the union of supports; 1 means
    /// identical, 0 means some point is missing on one side.
    pub ratio: Rational,
}

pub fn compare(exact: &Pmf, other: &Pmf) -> Result<Comparison, AnalysisError> {
    Ok(Comparison {
        l1: exact.l1_distance(other)?,
        ratio: exact.ratio_closeness(other)?,
    })
}

/// L¹ distance for float marginals such as occupation-time estimates.
pub fn l1_f64(exact: &BTreeMap<u64, f64>, other: &BTreeMap<u64, f64>) -> f64 {
    let mut keys: Vec<u64> = exact.keys().chain(other.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter()
        .map(|k| (exact.get(k).unwrap_or(&0.0) - other.get(k).unwrap_or(&0.0)).abs())
        .sum()
}

fn prob_string(p: &Rational) -> String {
    format_rational(p)
}

/// Float in the 17-significant-digit form used by every report.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn marginal_json(m: &Marginal) -> Value {
    let mut obj = Map::new();
    match m {
        Marginal::Exact(p) => {
            for (v, q) in p.iter1() {
                obj.insert(v.to_string(), Value::String(prob_string(q)));
            }
        }
        Marginal::Float(f) => {
            for (v, q) in f {
                obj.insert(v.to_string(), json!(q));
            }
        }
    }
    Value::Object(obj)
}

pub fn steady_json(states: usize, report: &SteadyReport, marginals: &[(String, Marginal)]) -> Value {
    let bsccs: Vec<Value> = report
        .bsccs
        .iter()
        .zip(&report.absorption)
        .map(|(b, a)| json!({"size": b.len(), "absorption": a.to_string()}))
        .collect();
    let mut ms = Map::new();
    for (name, m) in marginals {
        ms.insert(name.clone(), marginal_json(m));
    }
    json!({
        "method": report.method.name(),
        "states": states,
        "residual": report.residual,
        "bsccs": bsccs,
        "marginals": Value::Object(ms),
    })
}

/// Line-oriented steady-state report.
pub fn steady_lines(states: usize, report: &SteadyReport, marginals: &[(String, Marginal)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method {}", report.method.name());
    let _ = writeln!(s, "states {states}");
    let _ = writeln!(s, "bsccs {}", report.bsccs.len());
    for (b, a) in report.bsccs.iter().zip(&report.absorption) {
        let _ = writeln!(s, "bscc size={} absorption={a}", b.len());
    }
    if report.residual > 0.0 {
        let _ = writeln!(s, "residual {}", format_f64(report.residual));
    }
    for (name, m) in marginals {
        let _ = writeln!(s, "marginal {name}");
        match m {
            Marginal::Exact(p) => {
                for (v, q) in p.iter1() {
                    let _ = writeln!(s, "{v} : {}", prob_string(q));
                }
            }
            Marginal::Float(f) => {
                for (v, q) in f {
                    let _ = writeln!(s, "{v} : {}", format_f64(*q));
                }
            }
        }
    }
    s
}

pub fn trajectory_json(stats: &TrajectoryStats) -> Value {
    let mut stops = Map::new();
    for (reason, n) in stats.stop_counts() {
        stops.insert(reason.name().to_string(), json!(n));
    }
    let mut hs = Map::new();
    for (name, h) in stats.species.iter().zip(&stats.histograms) {
        let obj: Map<String, Value> = h.iter().map(|(v, c)| (v.to_string(), json!(c))).collect();
        hs.insert(name.clone(), Value::Object(obj));
    }
    json!({
        "trials": stats.trials,
        "seed": stats.seed,
        "stops": Value::Object(stops),
        "histograms": Value::Object(hs),
    })
}

pub fn trajectory_lines(stats: &TrajectoryStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials {}", stats.trials);
    let _ = writeln!(s, "seed {}", stats.seed);
    for (reason, n) in stats.stop_counts() {
        let _ = writeln!(s, "stop {} {n}", reason.name());
    }
    let mean_time = stats.runs.iter().map(|t| t.time).sum::<f64>() / stats.trials as f64;
    let _ = writeln!(s, "mean_time {}", format_f64(mean_time));
    for (name, h) in stats.species.iter().zip(&stats.histograms) {
        let _ = writeln!(s, "histogram {name}");
        s.push_str(&histogram_tsv(h));
    }
    s
}

/// `value<TAB>count` per line, ascending.
pub fn histogram_tsv(h: &BTreeMap<u64, u64>) -> String {
    h.iter().map(|(v, c)| format!("{v}\t{c}\n")).collect()
}

/// True when the probabilities sum to one (within 1e-9 on the float path).
pub fn is_normalized(d: &Distribution) -> bool {
    match d {
        Distribution::Exact(d) => d.iter().fold(Rational::zero(), |a, (_, p)| a + p).is_one(),
        Distribution::Float(d) => (d.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{explore, steady_state};
    use crate::crn::tests::{example_one, uniform};
    use crate::rational::{int, rat};

    #[test]
    fn compare_edge_cases() {
        let a = Pmf::dirac(0);
        assert_eq!(compare(&a, &a).unwrap(), Comparison { l1: int(0), ratio: int(1) });
        assert_eq!(compare(&a, &Pmf::dirac(1)).unwrap(), Comparison { l1: int(2), ratio: int(0) });
    }

    #[test]
    fn empirical_from_histogram() {
        let h = BTreeMap::from([(2, 1), (5, 3)]);
        assert_eq!(empirical_pmf(&h).unwrap(), Pmf::univariate([(2, rat(1, 4)), (5, rat(3, 4))]).unwrap());
        assert!(empirical_pmf(&BTreeMap::new()).is_err());
        assert_eq!(histogram_tsv(&h), "2\t1\n5\t3\n");
    }

    #[test]
    fn steady_serializations() {
        let mut c = example_one();
        let sp = explore(&c, 1000).unwrap();
        let r = steady_state(&sp);
        assert!(is_normalized(&r.distribution));
        let m = output_marginals(&c, &r).unwrap();
        let lines = steady_lines(sp.len(), &r, &m);
        assert!(lines.starts_with("method exact-rational-absorption\nstates 21\n"));
        assert!(lines.contains("marginal out\n2 : 1/6\n5 : 1/3\n10 : 1/2\n"));
        let j = steady_json(sp.len(), &r, &m);
        assert_eq!(j["marginals"]["out"]["10"], "1/2");
        assert_eq!(j["bsccs"].as_array().unwrap().len(), 3);

        c = uniform(2, 0);
        c.add_output("l1").unwrap();
        let r = steady_state(&explore(&c, 100).unwrap());
        let m = output_marginals(&c, &r).unwrap();
        assert_eq!(m[0].1.exact().unwrap().prob1(0), rat(1, 3));
    }

    #[test]
    fn float_l1() {
        let a = BTreeMap::from([(0, 0.5), (1, 0.5)]);
        let b = BTreeMap::from([(1, 0.25), (2, 0.75)]);
        assert!((l1_f64(&a, &b) - 1.5).abs() < 1e-15);
    }
}
