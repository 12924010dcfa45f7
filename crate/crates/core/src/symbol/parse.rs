//! Recursive-descent parser for symbol expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' integer)?
//! base   := number | 'i' | 'pi' | 'e' | 'z' | func '(' expr ')' | '(' expr ')'
//! func   := 'exp' | 'log'
//! ```
//!
//! Unary minus binds looser than `^`, so `-z^2` is `-(z^2)`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::{build, AnalyticSymbol, Node};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("non-integer exponent '{text}' at position {pos}")]
    NonIntegerExponent { pos: usize, text: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Scientific exponent only when a digit follows the 'e'.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                    pos: start,
                    msg: format!("malformed number '{s}'"),
                })?;
                out.push((start, Tok::Num(v, s.to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = build::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = build::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Arc<Node>, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = build::mul(lhs, self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs = build::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Arc<Node>, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(build::neg(self.factor()?));
        }
        let base = self.base()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v, text)) => {
                self.pos += 1;
                if v.fract() != 0.0 || !v.is_finite() || v.abs() > i32::MAX as f64 {
                    return Err(ParseError::NonIntegerExponent { pos: at, text });
                }
                let n = if negative { -(v as i32) } else { v as i32 };
                Ok(build::pow(base, n))
            }
            _ => self.syntax("expected integer exponent after '^'"),
        }
    }

    fn base(&mut self) -> Result<Arc<Node>, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v, _)) => {
                self.pos += 1;
                Ok(build::real(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "z" => Ok(build::var()),
                    "i" => Ok(build::constant(Complex64::new(0.0, 1.0))),
                    "pi" => Ok(build::real(std::f64::consts::PI)),
                    "e" => Ok(build::real(std::f64::consts::E)),
                    "exp" | "log" => {
                        self.expect(Tok::LParen, "'(' after function name")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(if name == "exp" {
                            build::exp(arg)
                        } else {
                            build::log(arg)
                        })
                    }
                    _ => Err(ParseError::UnknownIdentifier { pos: at, name }),
                }
            }
            Some(_) => self.syntax("expected a number, identifier or '('"),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses a textual expression in `z` into an [`AnalyticSymbol`].
pub fn parse_symbol(text: &str) -> Result<AnalyticSymbol, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let root = p.expr()?;
    if p.pos != p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(AnalyticSymbol::with_source(root, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, z: Complex64) -> Complex64 {
        parse_symbol(text).unwrap().evaluate(z).unwrap()
    }

    #[test]
    fn identity_symbol() {
        let s = parse_symbol("z").unwrap();
        assert_eq!(**s.root(), Node::Var);
        assert_eq!(eval("z", Complex64::new(0.5, 0.0)), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn power_of_difference() {
        let s = parse_symbol("(1-z)^2").unwrap();
        match s.root().as_ref() {
            Node::Pow(inner, 2) => assert!(matches!(inner.as_ref(), Node::Sub(..))),
            other => panic!("unexpected tree {other:?}"),
        }
        assert_eq!(eval("(1-z)^2", Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mobius_at_origin() {
        let v = eval("(0.3 - z)/(1 - 0.3*z)", Complex64::new(0.0, 0.0));
        assert!((v - Complex64::new(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn constants_and_unary_minus() {
        let z = Complex64::new(0.2, 0.1);
        assert!((eval("-z^2", z) + z * z).norm() < 1e-15);
        assert!((eval("2*i*z", z) - Complex64::new(0.0, 2.0) * z).norm() < 1e-15);
        assert!((eval("pi + e", z).re - (std::f64::consts::PI + std::f64::consts::E)).abs() < 1e-15);
        assert_eq!(eval("1e-3", z), Complex64::new(1e-3, 0.0));
        assert!((eval("z^-1", z) - z.inv()).norm() < 1e-15);
        assert!((eval(" exp ( z ) * log(1 + z) ", z) - z.exp() * (z + 1.0).ln()).norm() < 1e-15);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(parse_symbol("   "), Err(ParseError::Empty)));
        assert!(matches!(
            parse_symbol("(1-z)^1.5"),
            Err(ParseError::NonIntegerExponent { pos: 6, .. })
        ));
        assert!(matches!(
            parse_symbol("sin(z)"),
            Err(ParseError::UnknownIdentifier { pos: 0, .. })
        ));
        assert!(matches!(parse_symbol("z +"), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse_symbol("(z"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_symbol("2z"), Err(ParseError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_symbol("z # 1"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_symbol("z^z"), Err(ParseError::Syntax { .. })));
    }
}
