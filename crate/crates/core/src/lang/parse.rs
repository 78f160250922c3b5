use super::ast::{Expr, Gen};
use crate::error::{Error, Result};
use crate::exact::ncpoly::NCPoly;
use crate::exact::rational::{rat, rat_i};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Inv,
    Caret,
    Plus,
    Minus,
    Slash,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn peek(&mut self) -> Result<(Tok, usize)> {
        let save = self.pos;
        let out = self.next()?;
        self.pos = save;
        Ok(out)
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let at = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, at));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'^' => Tok::Caret,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: i64 = s.parse().map_err(|_| Error::Parse {
                    pos: at,
                    msg: "integer literal out of range".into(),
                })?;
                return Ok((Tok::Int(v), at));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                return Ok((
                    if s == "inv" { Tok::Inv } else { Tok::Ident(s.to_string()) },
                    at,
                ));
            }
            _ => {
                return Err(Error::Parse {
                    pos: at,
                    msg: format!("unexpected character {:?}", c as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, at))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
}

fn starts_factor(t: &Tok) -> bool {
    matches!(t, Tok::Int(_) | Tok::Ident(_) | Tok::Inv | Tok::LParen)
}

impl<'a> Parser<'a> {
    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = Vec::new();
        let mut negated = false;
        if let (Tok::Minus, _) = self.lex.peek()? {
            self.lex.next()?;
            negated = true;
        }
        parts.push((negated, self.term()?));
        loop {
            match self.lex.peek()? {
                (Tok::Plus, _) => {
                    self.lex.next()?;
                    parts.push((false, self.term()?));
                }
                (Tok::Minus, _) => {
                    self.lex.next()?;
                    parts.push((true, self.term()?));
                }
                _ => break,
            }
        }
        if parts.len() == 1 && !parts[0].0 {
            Ok(parts.pop().unwrap().1)
        } else {
            Ok(Expr::Sum(parts))
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while starts_factor(&self.lex.peek()?.0) {
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(Expr::Mul(factors))
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let (Tok::Caret, _) = self.lex.peek()? {
            self.lex.next()?;
            let (t, at) = self.lex.next()?;
            let Tok::Int(k) = t else {
                return self.err(at, "expected a non-negative integer exponent");
            };
            if k < 0 {
                return self.err(at, "expected a non-negative integer exponent");
            }
            return Ok(Expr::Pow(Box::new(base), k as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (t, at) = self.lex.next()?;
        match t {
            Tok::Int(num) => {
                if let (Tok::Slash, _) = self.lex.peek()? {
                    self.lex.next()?;
                    let (t2, at2) = self.lex.next()?;
                    let Tok::Int(den) = t2 else {
                        return self.err(at2, "expected a denominator");
                    };
                    if den <= 0 {
                        return self.err(at2, "denominator must be positive");
                    }
                    return Ok(Expr::Rat(rat(num, den)));
                }
                Ok(Expr::Rat(rat_i(num)))
            }
            Tok::Ident(name) => match Gen::from_name(&name) {
                Some(g) => Ok(Expr::Gen(g)),
                None => self.err(at, format!("unknown generator {name:?}")),
            },
            Tok::Inv => {
                let (t2, at2) = self.lex.next()?;
                if t2 != Tok::LParen {
                    return self.err(at2, "expected '(' after inv");
                }
                let inner = self.expr()?;
                let (t3, at3) = self.lex.next()?;
                if t3 != Tok::RParen {
                    return self.err(at3, "expected ')'");
                }
                let p = to_ncpoly(&inner)
                    .ok_or(Error::Parse { pos: at, msg: "inv argument must be a polynomial in Ncal and C".into() })?;
                Ok(Expr::Inv(p))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (t2, at2) = self.lex.next()?;
                if t2 != Tok::RParen {
                    return self.err(at2, "expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.err(at, "unexpected end of input"),
            other => self.err(at, format!("unexpected token {other:?}")),
        }
    }
}

/// Interpret an expression as a commutative polynomial in Ncal and C; None
/// when any other generator appears.
fn to_ncpoly(e: &Expr) -> Option<NCPoly> {
    match e {
        Expr::Rat(q) => Some(NCPoly::constant(q.clone())),
        Expr::Gen(Gen::Ncal) => Some(NCPoly::ncal()),
        Expr::Gen(Gen::C) => Some(NCPoly::ccal()),
        Expr::Gen(_) | Expr::Inv(_) => None,
        Expr::Pow(b, k) => Some(to_ncpoly(b)?.pow(*k)),
        Expr::Mul(parts) => {
            let mut acc = NCPoly::one();
            for p in parts {
                acc = acc.mul(&to_ncpoly(p)?);
            }
            Some(acc)
        }
        Expr::Sum(parts) => {
            let mut acc = NCPoly::zero();
            for (negated, p) in parts {
                let q = to_ncpoly(p)?;
                acc = if *negated { acc.sub(&q) } else { acc.add(&q) };
            }
            Some(acc)
        }
    }
}

/// Parse operator-language text.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { lex: Lexer::new(text) };
    let e = p.expr()?;
    let (t, at) = p.lex.next()?;
    if t != Tok::End {
        return Err(Error::Parse { pos: at, msg: "trailing input".into() });
    }
    Ok(e)
}
