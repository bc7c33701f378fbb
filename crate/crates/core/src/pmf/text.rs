//! Line format: `value[,value...] : num/den`, `#` starts a comment.

use std::fmt::Write;

use super::{Pmf, PmfError, Point};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::TextError;

pub fn parse_pmf(text: &str) -> Result<Pmf, TextError> {
    let mut dim = None;
    let mut entries: Vec<(Point, Rational)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| TextError { line: line_no, column: 1, message };
        let (lhs, rhs) = line
            .split_once(':')
            .ok_or_else(|| err("expected `value : probability`".into()))?;
        let point = lhs
            .split(',')
            .map(|v| v.trim().parse::<u64>())
            .collect::<Result<Point, _>>()
            .map_err(|_| err(format!("invalid support point `{}`", lhs.trim())))?;
        let p = parse_rational(rhs)
            .ok_or_else(|| err(format!("invalid probability `{}`", rhs.trim())))?;
        match dim {
            None => dim = Some(point.len()),
            Some(d) if d != point.len() => {
                return Err(err(format!(
                    "point has {} components, first line had {d}",
                    point.len()
                )))
            }
            _ => {}
        }
        if entries.iter().any(|(q, _)| *q == point) {
            return Err(err(format!("duplicate point {}", join(&point))));
        }
        entries.push((point, p));
    }
    let dim = dim.ok_or(TextError { line: 1, column: 1, message: "empty pmf file".into() })?;
    Pmf::new(dim, entries).map_err(|e: PmfError| TextError {
        line: 0,
        column: 0,
        message: e.to_string(),
    })
}

/// One line per support point in ascending order, probabilities as `num/den`.
pub fn format_pmf(f: &Pmf) -> String {
    let mut out = String::new();
    for (point, p) in f.iter() {
        let _ = writeln!(out, "{} : {}", join(point), format_rational(p));
    }
    out
}

fn join(point: &[u64]) -> String {
    point.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}
