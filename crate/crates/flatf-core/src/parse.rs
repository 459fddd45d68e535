//! Recursive-descent parser for the polynomial expression grammar.
//!
//! Grammar: integers, rationals `a/b`, identifiers `[A-Za-z_][A-Za-z0-9_]*`,
//! the operators `+ - * ^`, unary minus, and parentheses. `^` takes a
//! non-negative integer literal. Implicit multiplication is not allowed, and
//! `/` only occurs inside a rational literal.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::poly::{Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("zero denominator in rational literal at byte {pos}")]
    ZeroDenominator { pos: usize },
    #[error("exponent at byte {pos} does not fit in u32")]
    ExponentTooLarge { pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let start = self.pos;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((start, Tok::Plus));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((start, Tok::Minus));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((start, Tok::Star));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((start, Tok::Caret));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((start, Tok::Slash));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((start, Tok::LParen));
                    self.pos += 1;
                }
                b')' => {
                    out.push((start, Tok::RParen));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((start, Tok::Int(text.parse().unwrap())));
                }
                b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((start, Tok::Ident(text.to_string())));
                }
                other => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        message: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    vars: &'a [String],
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<usize, ParseError> {
        match self.bump() {
            Some((p, t)) if &t == want => Ok(p),
            Some((p, _)) => Err(ParseError::Syntax {
                pos: p,
                message: format!("expected {}", what),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: format!("expected {}, found end of input", what),
            }),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    // factor := '-' factor | atom ('^' nat)?
    fn factor(&mut self) -> Result<Poly, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            let caret_pos = self.pos();
            self.bump();
            let (p, t) = self.bump().ok_or(ParseError::Syntax {
                pos: self.end,
                message: "expected a non-negative integer exponent".into(),
            })?;
            let exp = match t {
                Tok::Int(n) => {
                    u32::try_from(&n).map_err(|_| ParseError::ExponentTooLarge { pos: p })?
                }
                _ => {
                    return Err(ParseError::Syntax {
                        pos: if p == caret_pos { self.end } else { p },
                        message: "expected a non-negative integer exponent".into(),
                    })
                }
            };
            let mut acc = Poly::one(self.vars.len());
            for _ in 0..exp {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    // atom := '(' expr ')' | INT ('/' INT)? | IDENT
    fn atom(&mut self) -> Result<Poly, ParseError> {
        match self.bump() {
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some((_, Tok::Int(num))) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let (p, t) = self.bump().ok_or(ParseError::Syntax {
                        pos: self.end,
                        message: "expected a denominator".into(),
                    })?;
                    match t {
                        Tok::Int(den) => {
                            if den.is_zero() {
                                return Err(ParseError::ZeroDenominator { pos: p });
                            }
                            Ok(Poly::constant(self.vars.len(), Rat::new(num, den)))
                        }
                        _ => Err(ParseError::Syntax {
                            pos: p,
                            message: "expected an integer denominator".into(),
                        }),
                    }
                } else {
                    Ok(Poly::constant(self.vars.len(), Rat::from(num)))
                }
            }
            Some((p, Tok::Ident(name))) => match self.vars.iter().position(|v| v == &name) {
                Some(i) => Ok(Poly::var(self.vars.len(), i)),
                None => Err(ParseError::UnknownVariable { pos: p, name }),
            },
            Some((p, _)) => Err(ParseError::Syntax {
                pos: p,
                message: "expected a number, variable, or parenthesized expression".into(),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse `text` as a polynomial in the named variables.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<Poly, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        toks,
        idx: 0,
        vars,
        end: text.len(),
    };
    let poly = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(ParseError::Syntax {
            pos: parser.pos(),
            message: "trailing input".into(),
        });
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::Monomial;
    use crate::poly::{rat, rat_int};

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_scaled_power() {
        let v = vars(&["x"]);
        let p = parse_poly("1/3*x^3", &v).unwrap();
        assert_eq!(p, Poly::from_term(Monomial(vec![3]), rat(1, 3)));
    }

    #[test]
    fn parses_product_potential() {
        let v = vars(&["y", "z0", "z1", "z2"]);
        let p = parse_poly("y*(z0^3+z1^3+z2^3)", &v).unwrap();
        let mut expect = Poly::zero(4);
        expect.add_term(Monomial(vec![1, 3, 0, 0]), rat_int(1));
        expect.add_term(Monomial(vec![1, 0, 3, 0]), rat_int(1));
        expect.add_term(Monomial(vec![1, 0, 0, 3]), rat_int(1));
        assert_eq!(p, expect);
    }

    #[test]
    fn rejects_negative_exponent() {
        let v = vars(&["x"]);
        let err = parse_poly("x^-1", &v).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }), "{err}");
    }

    #[test]
    fn rejects_unknown_variable() {
        let v = vars(&["x"]);
        let err = parse_poly("x + q", &v).unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownVariable {
                pos: 4,
                name: "q".into()
            }
        );
    }

    #[test]
    fn rejects_zero_denominator() {
        let v = vars(&["x"]);
        let err = parse_poly("1/0*x", &v).unwrap_err();
        assert_eq!(err, ParseError::ZeroDenominator { pos: 2 });
    }

    #[test]
    fn rejects_implicit_multiplication() {
        let v = vars(&["x", "y"]);
        assert!(parse_poly("2 x", &v).is_err());
        assert!(parse_poly("x y", &v).is_err());
        assert!(parse_poly("2(x+y)", &v).is_err());
    }

    #[test]
    fn unary_minus_and_parentheses() {
        let v = vars(&["x"]);
        let p = parse_poly("-(x-2)^2", &v).unwrap();
        let x = Poly::var(1, 0);
        let two = Poly::constant(1, rat_int(2));
        let expect = x.sub(&two).mul(&x.sub(&two)).neg();
        assert_eq!(p, expect);
        // `-x^2` is -(x^2), not (-x)^2
        assert_eq!(
            parse_poly("-x^2", &v).unwrap(),
            Poly::from_term(Monomial(vec![2]), rat_int(-1))
        );
    }

    #[test]
    fn print_then_parse_round_trips() {
        let v = vars(&["x", "y"]);
        let p = parse_poly("x^2 - 1/2*x*y - 1", &v).unwrap();
        let printed = p.to_string_with(&v);
        assert_eq!(parse_poly(&printed, &v).unwrap(), p);
    }
}
