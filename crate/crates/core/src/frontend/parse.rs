//! Text grammar for rational expressions and operators.
//!
//! Variables `t`, `x1`..`x9`; derivations `Dt`, `Dx1`..`Dx9`; integers;
//! `+ - * / ^` and parentheses. Juxtaposition is forbidden — products
//! need an explicit `*`. Division requires a derivation-free divisor,
//! and `^` a literal nonnegative integer exponent.

use crate::error::{Error, Result};
use crate::ore::OreOperator;
use crate::poly::{Coeff, MultiPoly};
use crate::rational::RationalFunction;
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Der(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = src.chars().peekable();
    while let Some(&ch) = it.peek() {
        let (l, c) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            ' ' | '\t' | '\r' | '\n' => {
                it.next();
                bump(ch, &mut line, &mut col);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        it.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let n = s
                    .parse::<BigInt>()
                    .map_err(|_| err(l, c, "bad integer literal"))?;
                out.push(Spanned { tok: Tok::Int(n), line: l, col: c });
            }
            'a'..='z' | 'A'..='Z' => {
                let mut s = String::new();
                while let Some(&d) = it.peek() {
                    if d.is_ascii_alphanumeric() {
                        s.push(d);
                        it.next();
                        bump(d, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let tok = match s.as_str() {
                    "t" => Tok::Var(0),
                    "Dt" => Tok::Der(0),
                    _ => {
                        let (name, der) = match s.strip_prefix("Dx") {
                            Some(rest) => (rest, true),
                            None => (s.strip_prefix('x').unwrap_or(""), false),
                        };
                        match name.parse::<usize>() {
                            Ok(i) if (1..=9).contains(&i) => {
                                if der {
                                    Tok::Der(i)
                                } else {
                                    Tok::Var(i)
                                }
                            }
                            _ => return Err(err(l, c, format!("unknown name `{s}`"))),
                        }
                    }
                };
                out.push(Spanned { tok, line: l, col: c });
            }
            _ => {
                let tok = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => return Err(err(l, c, format!("unexpected character `{ch}`"))),
                };
                it.next();
                bump(ch, &mut line, &mut col);
                out.push(Spanned { tok, line: l, col: c });
            }
        }
    }
    Ok(out)
}

/// A parsed value: either derivation-free or an operator in a single
/// derivation. Mixing two different derivations in one expression is
/// rejected (the operator algebra here is univariate).
#[derive(Clone, Debug)]
enum Value {
    Rat(RationalFunction),
    Op(OreOperator),
}

impl Value {
    fn into_op(self, der: usize) -> OreOperator {
        match self {
            Value::Rat(f) => OreOperator::from_rational(f).with_der(der),
            Value::Op(p) => p,
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn end_pos(&self) -> (usize, usize) {
        self.toks
            .last()
            .map(|s| (s.line, s.col + 1))
            .unwrap_or((1, 1))
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        while let Some(s) = self.peek() {
            let neg = match s.tok {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            let (l, c) = (s.line, s.col);
            self.pos += 1;
            let rhs = self.term()?;
            let rhs = if neg { neg_value(rhs) } else { rhs };
            acc = add_values(acc, rhs).map_err(|m| err(l, c, m))?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.factor()?;
        while let Some(s) = self.peek() {
            let division = match s.tok {
                Tok::Star => false,
                Tok::Slash => true,
                _ => break,
            };
            let (l, c) = (s.line, s.col);
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if division {
                div_values(acc, rhs).map_err(|m| err(l, c, m))?
            } else {
                mul_values(acc, rhs).map_err(|m| err(l, c, m))?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value> {
        if let Some(s) = self.peek() {
            if s.tok == Tok::Minus {
                self.pos += 1;
                return Ok(neg_value(self.factor()?));
            }
            if s.tok == Tok::Plus {
                self.pos += 1;
                return self.factor();
            }
        }
        let base = self.atom()?;
        if let Some(s) = self.peek() {
            if s.tok == Tok::Caret {
                let (l, c) = (s.line, s.col);
                self.pos += 1;
                let e = match self.peek() {
                    Some(Spanned { tok: Tok::Int(n), .. }) => n.clone(),
                    _ => return Err(err(l, c, "exponent must be an integer literal")),
                };
                self.pos += 1;
                let e: u32 = e
                    .try_into()
                    .map_err(|_| err(l, c, "exponent out of range"))?;
                return Ok(match base {
                    Value::Rat(f) => Value::Rat(f.pow(e)),
                    Value::Op(p) => Value::Op(p.pow(e)),
                });
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let Some(s) = self.peek().cloned() else {
            let (l, c) = self.end_pos();
            return Err(err(l, c, "unexpected end of input"));
        };
        match s.tok {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Value::Rat(RationalFunction::constant(
                    self.arity,
                    Coeff::from_integer(n),
                )))
            }
            Tok::Var(v) => {
                self.pos += 1;
                Ok(Value::Rat(RationalFunction::from_poly(MultiPoly::var(
                    self.arity, v,
                ))))
            }
            Tok::Der(d) => {
                self.pos += 1;
                Ok(Value::Op(OreOperator::der_op(self.arity, d)))
            }
            Tok::LParen => {
                self.pos += 1;
                let v = self.expr()?;
                match self.peek() {
                    Some(Spanned { tok: Tok::RParen, .. }) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Some(s) => Err(err(s.line, s.col, "expected `)`")),
                    None => {
                        let (l, c) = self.end_pos();
                        Err(err(l, c, "unclosed parenthesis"))
                    }
                }
            }
            _ => Err(err(s.line, s.col, "expected a value")),
        }
    }
}

fn neg_value(v: Value) -> Value {
    match v {
        Value::Rat(f) => Value::Rat(f.neg()),
        Value::Op(p) => Value::Op(p.neg()),
    }
}

fn add_values(a: Value, b: Value) -> std::result::Result<Value, String> {
    match (a, b) {
        (Value::Rat(f), Value::Rat(g)) => Ok(Value::Rat(f.add(&g))),
        (a, b) => {
            let der = match (&a, &b) {
                (Value::Op(p), Value::Op(q)) if p.der() != q.der() => {
                    return Err("cannot mix two different derivations".into())
                }
                (Value::Op(p), _) => p.der(),
                (_, Value::Op(q)) => q.der(),
                _ => unreachable!(),
            };
            Ok(Value::Op(a.into_op(der).add(&b.into_op(der))))
        }
    }
}

fn mul_values(a: Value, b: Value) -> std::result::Result<Value, String> {
    match (a, b) {
        (Value::Rat(f), Value::Rat(g)) => Ok(Value::Rat(f.mul(&g))),
        (Value::Rat(f), Value::Op(p)) => Ok(Value::Op(p.scale(&f))),
        (Value::Op(p), Value::Rat(f)) => {
            let der = p.der();
            Ok(Value::Op(
                p.mul(&OreOperator::from_rational(f).with_der(der)),
            ))
        }
        (Value::Op(p), Value::Op(q)) => {
            if p.der() != q.der() {
                return Err("cannot mix two different derivations".into());
            }
            Ok(Value::Op(p.mul(&q)))
        }
    }
}

fn div_values(a: Value, b: Value) -> std::result::Result<Value, String> {
    let g = match b {
        Value::Rat(g) => g,
        Value::Op(_) => return Err("divisor must be free of derivations".into()),
    };
    if g.is_zero() {
        return Err("division by zero".into());
    }
    match a {
        Value::Rat(f) => Ok(Value::Rat(f.div(&g).expect("nonzero divisor"))),
        Value::Op(p) => Ok(Value::Op(p.scale(&g.inv().expect("nonzero divisor")))),
    }
}

fn parse_value(src: &str, arity: usize) -> Result<Value> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, arity };
    let v = p.expr()?;
    if let Some(s) = p.peek() {
        return Err(err(s.line, s.col, "trailing input after expression"));
    }
    Ok(v)
}

/// Smallest arity accommodating every variable mentioned in the
/// sources (slot 0 is always present for `t`).
pub fn scan_arity(srcs: &[&str]) -> Result<usize> {
    let mut arity = 1;
    for src in srcs {
        for s in lex(src)? {
            let v = match s.tok {
                Tok::Var(v) | Tok::Der(v) => v,
                _ => continue,
            };
            arity = arity.max(v + 1);
        }
    }
    Ok(arity)
}

pub fn parse_rational(src: &str, arity: usize) -> Result<RationalFunction> {
    match parse_value(src, arity)? {
        Value::Rat(f) => Ok(f),
        Value::Op(_) => Err(Error::Invalid(format!(
            "expected a derivation-free expression, got an operator: {src}"
        ))),
    }
}

pub fn parse_operator(src: &str, arity: usize) -> Result<OreOperator> {
    Ok(parse_value(src, arity)?.into_op(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let a = 2;
        let f = parse_rational("x1/(x1*t + 1)", a).unwrap();
        let g = RationalFunction::new(
            MultiPoly::x(a, 1),
            MultiPoly::x(a, 1).mul(&MultiPoly::t(a)).add(&MultiPoly::one(a)),
        )
        .unwrap();
        assert_eq!(f, g);
        assert_eq!(parse_rational(&format!("{f}"), a).unwrap(), f);
    }

    #[test]
    fn operator_roundtrip() {
        let a = 2;
        let p = parse_operator("Dt^2 + (x1/(x1*t+1))*Dt", a).unwrap();
        assert_eq!(p.order(), Some(2));
        assert_eq!(parse_operator(&format!("{p}"), a).unwrap(), p);
        // right-side rational factors compose, not scale
        let q = parse_operator("Dt*t", a).unwrap();
        let r = parse_operator("t*Dt + 1", a).unwrap();
        assert_eq!(q, r);
    }

    #[test]
    fn diagnostics_carry_position() {
        match parse_operator("Dt +\n  y", 2) {
            Err(Error::Parse { line: 2, col: 3, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        assert!(parse_operator("Dt Dt", 2).is_err()); // juxtaposition
        assert!(parse_operator("1/Dt", 2).is_err());
        assert!(parse_operator("Dt + Dx1", 2).is_err());
    }

    #[test]
    fn arity_scan() {
        assert_eq!(scan_arity(&["Dt + 1"]).unwrap(), 1);
        assert_eq!(scan_arity(&["Dt", "x3*t"]).unwrap(), 4);
    }
}
