//! Concrete syntax.
//!
//! ```text
//! formula := term ('+' term)*
//! term    := number '*' term | primary
//! primary := 'one' | 'zero' | 'min' '(' formula ',' formula ')'
//!          | '(' formula ')' [ '_[' dexpr ']' ':' '(' formula ')' ]
//! dexpr   := dterm ('+' dterm)*
//! dterm   := number [ '*' ident ] | ident
//! number  := digits | digits '/' digits | digits '.' digits
//! ```

use num::{One, Zero};

use super::ast::{DExpr, Formula};
use super::CalculusError;
use crate::rational::{parse_rational, Rational};
use crate::TextError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(Rational),
    Ident(String),
    Plus,
    Star,
    LParen,
    RParen,
    ChoiceOpen,
    RBracket,
    Colon,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, TextError> {
    let mut out = Vec::new();
    for (line_idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (offset, c) = chars[i];
            let column = i + 1;
            let at = |tok| Spanned { tok, line: line_idx + 1, column };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '_' && chars.get(i + 1).map(|&(_, n)| n) == Some('[') {
                out.push(at(Tok::ChoiceOpen));
                i += 2;
                continue;
            }
            let scan = |i: &mut usize, accept: fn(char) -> bool| {
                while *i < chars.len() && accept(chars[*i].1) {
                    *i += 1;
                }
                chars.get(*i).map_or(line.len(), |&(o, _)| o)
            };
            if c.is_ascii_digit() {
                let end = scan(&mut i, |ch| ch.is_ascii_digit() || ch == '.' || ch == '/');
                let lit = &line[offset..end];
                let value = parse_rational(lit).ok_or_else(|| TextError {
                    line: line_idx + 1,
                    column,
                    message: format!("invalid number `{lit}`"),
                })?;
                out.push(at(Tok::Number(value)));
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let end = scan(&mut i, |ch| ch.is_ascii_alphanumeric() || ch == '_');
                out.push(at(Tok::Ident(line[offset..end].to_string())));
                continue;
            }
            let tok = match c {
                '+' => Tok::Plus,
                '*' | '\u{b7}' => Tok::Star,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ']' => Tok::RBracket,
                ':' => Tok::Colon,
                ',' => Tok::Comma,
                _ => {
                    return Err(TextError {
                        line: line_idx + 1,
                        column,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            out.push(at(tok));
            i += 1;
        }
    }
    let (line, column) = out.last().map(|s| (s.line, s.column + 1)).unwrap_or((1, 1));
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> CalculusError {
        let s = &self.toks[self.pos];
        CalculusError::Syntax(TextError {
            line: s.line,
            column: s.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), CalculusError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(self.peek()))))
        }
    }

    fn formula(&mut self) -> Result<Formula, CalculusError> {
        let mut acc = self.term()?;
        while *self.peek() == Tok::Plus {
            self.next();
            let rhs = self.term()?;
            acc = Formula::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Formula, CalculusError> {
        if let Tok::Number(k) = self.peek().clone() {
            self.next();
            self.expect(Tok::Star, "`*` after a scale factor")?;
            let inner = self.term()?;
            return Ok(Formula::scale(k, inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, CalculusError> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "one" => {
                self.next();
                Ok(Formula::One)
            }
            Tok::Ident(name) if name == "zero" => {
                self.next();
                Ok(Formula::Zero)
            }
            Tok::Ident(name) if name == "min" => {
                self.next();
                self.expect(Tok::LParen, "`(` after `min`")?;
                let a = self.formula()?;
                self.expect(Tok::Comma, "`,` between the arguments of `min`")?;
                let b = self.formula()?;
                self.expect(Tok::RParen, "`)` closing `min`")?;
                Ok(Formula::min(a, b))
            }
            Tok::LParen => {
                self.next();
                let a = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                if *self.peek() != Tok::ChoiceOpen {
                    return Ok(a);
                }
                self.next();
                let weight = self.dexpr()?;
                self.expect(Tok::RBracket, "`]` closing the weight")?;
                self.expect(Tok::Colon, "`:` after the weight")?;
                self.expect(Tok::LParen, "`(` around the second branch")?;
                let b = self.formula()?;
                self.expect(Tok::RParen, "`)` closing the second branch")?;
                Ok(Formula::choice(a, weight, b))
            }
            other => Err(self.error(format!("expected a formula, found {}", describe(&other)))),
        }
    }

    fn dexpr(&mut self) -> Result<DExpr, CalculusError> {
        let start = self.pos;
        let mut constant = Rational::zero();
        let mut terms: Vec<(Rational, String)> = Vec::new();
        loop {
            let here = self.pos;
            match self.next().tok {
                Tok::Number(p) => {
                    if *self.peek() == Tok::Star {
                        self.next();
                        let var_pos = self.pos;
                        match self.next().tok {
                            Tok::Ident(v) => terms.push((p, v)),
                            other => {
                                self.pos = var_pos;
                                return Err(self.error(format!(
                                    "expected a variable name, found {}",
                                    describe(&other)
                                )));
                            }
                        }
                    } else {
                        constant += p;
                    }
                }
                Tok::Ident(v) => terms.push((Rational::one(), v)),
                other => {
                    self.pos = here;
                    return Err(self.error(format!("expected a weight term, found {}", describe(&other))));
                }
            }
            if *self.peek() != Tok::Plus {
                break;
            }
            self.next();
        }
        let d = DExpr { constant, terms };
        d.validate().map_err(|e| match e {
            CalculusError::InvalidWeight(msg) => {
                let s = &self.toks[start];
                CalculusError::InvalidWeight(format!("{}:{}: {msg}", s.line, s.column))
            }
            other => other,
        })?;
        Ok(d)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Number(r) => format!("number `{r}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Star => "`*`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::ChoiceOpen => "`_[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, CalculusError> {
    let toks = lex(text).map_err(CalculusError::Syntax)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {} after the formula", describe(p.peek()))));
    }
    Ok(f)
}

/// Formula files may carry `#` comments; exactly one formula per file.
pub fn parse_formula_file(text: &str) -> Result<Formula, CalculusError> {
    parse_formula(text)
}

/// Parses a weight expression on its own, e.g. `1/1000*c + 1/5`.
pub fn parse_dexpr(text: &str) -> Result<DExpr, CalculusError> {
    let toks = lex(text).map_err(CalculusError::Syntax)?;
    let mut p = Parser { toks, pos: 0 };
    let d = p.dexpr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {} after the weight", describe(p.peek()))));
    }
    Ok(d)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn bern() -> Formula {
        Formula::choice(Formula::One, DExpr::constant(rat(1, 3)).unwrap(), Formula::Zero)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(parse_formula("one").unwrap(), Formula::One);
        assert_eq!(parse_formula("(one)_[1/3]:(zero)").unwrap(), bern());
        let p1 = parse_formula("(one)_[1/1000*c + 1/5]:(4*one) + (2*one)_[2/5]:(3*one)").unwrap();
        let left = Formula::choice(
            Formula::One,
            DExpr::new(rat(1, 5), vec![(rat(1, 1000), "c".into())]).unwrap(),
            Formula::scale(int(4), Formula::One),
        );
        let right = Formula::choice(
            Formula::scale(int(2), Formula::One),
            DExpr::constant(rat(2, 5)).unwrap(),
            Formula::scale(int(3), Formula::One),
        );
        assert_eq!(p1, Formula::sum(left, right));
    }

    #[test]
    fn decimals_and_comments() {
        let f = parse_formula("# bias\n(one)_[0.001*c + 0.2]:(zero) # trailing\n").unwrap();
        match f {
            Formula::Choice(_, d, _) => {
                assert_eq!(d.constant, rat(1, 5));
                assert_eq!(d.terms, vec![(rat(1, 1000), "c".to_string())]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence() {
        let f = parse_formula("2*one + 3/2*min(one, zero)").unwrap();
        assert_eq!(
            f,
            Formula::sum(
                Formula::scale(int(2), Formula::One),
                Formula::scale(rat(3, 2), Formula::min(Formula::One, Formula::Zero))
            )
        );
        assert_eq!(parse_formula("6/4*one").unwrap(), Formula::scale(rat(3, 2), Formula::One));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_formula("one +\n  two") {
            Err(CalculusError::Syntax(e)) => assert_eq!((e.line, e.column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_formula("(one)_[3/4 + 1/2*c]:(zero)"), Err(CalculusError::InvalidWeight(_))));
        assert!(matches!(parse_formula("(one)_[1/2]:zero"), Err(CalculusError::Syntax(_))));
        assert!(matches!(parse_formula("one one"), Err(CalculusError::Syntax(_))));
        assert!(matches!(parse_formula("1/0*one"), Err(CalculusError::Syntax(_))));
        assert!(matches!(parse_formula("2 one"), Err(CalculusError::Syntax(_))));
    }

    pub fn arb_formula(vars: bool) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![Just(Formula::One), Just(Formula::Zero)];
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let weight = if vars {
                (0i64..=4, 0i64..=4, proptest::bool::ANY)
                    .prop_map(|(a, b, with_var)| {
                        let (a, b) = (a.min(4 - b), b);
                        if with_var {
                            DExpr::new(rat(a, 8), vec![(rat(b, 8), "c".into())]).unwrap()
                        } else {
                            DExpr::constant(rat(a + b, 8)).unwrap()
                        }
                    })
                    .boxed()
            } else {
                (0i64..=6, 1i64..=6)
                    .prop_map(|(a, b)| DExpr::constant(rat(a.min(b), b)).unwrap())
                    .boxed()
            };
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::sum(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::min(a, b)),
                (0i64..=6, 1i64..=6, inner.clone()).prop_map(|(a, b, p)| Formula::scale(rat(a, b), p)),
                (inner.clone(), weight, inner).prop_map(|(a, d, b)| Formula::choice(a, d, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula(true)) {
            let text = f.to_string();
            prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
        }
    }
}
