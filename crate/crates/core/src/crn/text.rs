//! Line-oriented network format.
//!
//! ```text
//! species A, Z, Out
//! init A = 3
//! rxn Z -> A11 @ 1/6
//! rxn A + A11 -> A11 + Out      # rate defaults to 1
//! rxn 2 X -> 0 @ 5              # `0` or `∅` is the empty complex
//! output Out
//! flag noncomposable
//! meta rho = 1000000            # free-form manifest entries
//! ```
//!
//! Species used in `init` or `rxn` lines are declared on first use; the
//! `species` line only fixes the order of the ones it lists.

use std::fmt::Write;

use num::One;

use super::{Complex, Crs, CrnError, Reaction};
use crate::rational::{format_rational_short, parse_rational};
use crate::TextError;

/// A parsed network file: the network plus its manifest entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrnDocument {
    pub crs: Crs,
    pub manifest: Vec<(String, String)>,
}

impl CrnDocument {
    pub fn manifest_value(&self, key: &str) -> Option<&str> {
        self.manifest
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn parse_crn(text: &str) -> Result<CrnDocument, TextError> {
    let mut crs = Crs::new();
    let mut manifest = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let column = raw.find(line).map_or(1, |c| c + 1);
        let err = |message: String| TextError { line: line_no, column, message };
        let lift = |e: CrnError| err(e.to_string());
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "species" => {
                for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    crs.add_species(name, 0).map_err(lift)?;
                }
            }
            "init" => {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `init NAME = COUNT`".into()))?;
                let count: u64 = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("invalid count `{}`", value.trim())))?;
                declare(&mut crs, name.trim()).map_err(lift)?;
                crs.set_initial(name.trim(), count).map_err(lift)?;
            }
            "rxn" => {
                let (body, rate) = match rest.split_once('@') {
                    Some((b, r)) => (
                        b,
                        parse_rational(r).ok_or_else(|| err(format!("invalid rate `{}`", r.trim())))?,
                    ),
                    None => (rest, crate::rational::Rational::one()),
                };
                let (lhs, rhs) = body
                    .split_once("->")
                    .ok_or_else(|| err("expected `SOURCE -> PRODUCT`".into()))?;
                let source = parse_complex(&mut crs, lhs).map_err(err)?;
                let product = parse_complex(&mut crs, rhs).map_err(err)?;
                crs.push_reaction(Reaction { source, product, rate }).map_err(lift)?;
            }
            "output" => {
                for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    crs.add_output(name).map_err(lift)?;
                }
            }
            "flag" => match rest {
                "noncomposable" => crs.set_composable(false),
                other => return Err(err(format!("unknown flag `{other}`"))),
            },
            "meta" => {
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `meta KEY = VALUE`".into()))?;
                manifest.push((k.trim().to_string(), v.trim().to_string()));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    Ok(CrnDocument { crs, manifest })
}

/// Species mentioned in `init` or `rxn` lines need no `species` declaration.
fn declare(crs: &mut Crs, name: &str) -> Result<usize, CrnError> {
    match crs.species_id(name) {
        Ok(id) => Ok(id),
        Err(_) => crs.add_species(name, 0),
    }
}

fn parse_complex(crs: &mut Crs, text: &str) -> Result<Complex, String> {
    let text = text.trim();
    if text.is_empty() || text == "0" || text == "∅" {
        return Ok(Complex::empty());
    }
    let mut terms = Vec::new();
    for part in text.split('+').map(str::trim) {
        let (coeff, name) = match part.split_once(char::is_whitespace) {
            Some((c, n)) if c.bytes().all(|b| b.is_ascii_digit()) => (
                c.parse::<u64>().map_err(|_| format!("invalid coefficient `{c}`"))?,
                n.trim(),
            ),
            _ => (1, part),
        };
        let id = declare(crs, name).map_err(|e| e.to_string())?;
        terms.push((id, coeff));
    }
    Ok(Complex::new(terms))
}

fn format_complex(crs: &Crs, c: &Complex) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.terms()
        .iter()
        .map(|&(s, n)| {
            if n == 1 {
                crs.species_name(s).to_string()
            } else {
                format!("{n} {}", crs.species_name(s))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn format_crn(crs: &Crs, manifest: &[(String, String)]) -> String {
    let mut out = String::new();
    if !crs.species().is_empty() {
        let _ = writeln!(out, "species {}", crs.species().join(", "));
    }
    for (name, count) in crs.species().iter().zip(crs.initial_state().0) {
        if count != 0 {
            let _ = writeln!(out, "init {name} = {count}");
        }
    }
    for r in crs.reactions() {
        let _ = writeln!(
            out,
            "rxn {} -> {} @ {}",
            format_complex(crs, &r.source),
            format_complex(crs, &r.product),
            format_rational_short(&r.rate)
        );
    }
    if !crs.outputs().is_empty() {
        let _ = writeln!(out, "output {}", crs.output_names().join(", "));
    }
    if !crs.composable() {
        let _ = writeln!(out, "flag noncomposable");
    }
    for (k, v) in manifest {
        let _ = writeln!(out, "meta {k} = {v}");
    }
    out
}
