//! Exact rational helpers shared by the text formats.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Parses `a/b`, `a` or a decimal literal such as `0.25` into an exact rational.
///
/// Signs are accepted so callers can report a precise range error instead of a
/// syntax error.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = parse_int(num.trim())?;
        let d: BigInt = parse_int(den.trim())?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_digits}{frac_part}");
        let n: BigInt = digits.parse().ok()?;
        let d = num::pow(BigInt::from(10), frac_part.len());
        let r = Rational::new(n, d);
        return Some(if negative { -r } else { r });
    }
    Some(Rational::from_integer(parse_int(s)?))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.trim_start_matches(['-', '+']);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Always `num/den`, including integers (`1/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `num/den`, or just `num` when the denominator is one.
pub fn format_rational_short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format_rational(r)
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_probability(p: &Rational) -> bool {
    !p.is_negative() && *p <= Rational::one()
}

/// Converts a nonnegative integral rational to `u64`.
pub fn to_natural(r: &Rational) -> Option<u64> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_u64()
    } else {
        None
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("1/3"), Some(rat(1, 3)));
        assert_eq!(parse_rational(" 4 "), Some(int(4)));
        assert_eq!(parse_rational("0.2"), Some(rat(1, 5)));
        assert_eq!(parse_rational("0.001"), Some(rat(1, 1000)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-1/2"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("a/2"), None);
        assert_eq!(parse_rational("1."), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&int(1)), "1/1");
        assert_eq!(format_rational_short(&int(1)), "1");
        assert_eq!(format_rational_short(&rat(6, 4)), "3/2");
    }
}
