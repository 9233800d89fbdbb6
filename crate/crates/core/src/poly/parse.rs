//! Text grammar for polynomials and scalars.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! `pi` is the uniformizer and `gf` the generator of `F_q` for power-series
//! rings over a proper extension field. Division is only by nonzero
//! constants.

use super::{Poly, PolyRing};
use crate::dvr::{Dvr, Scalar};
use crate::error::{Error, Result};

/// Exponent and size limits that keep hostile input bounded.
const MAX_EXPONENT: u32 = 256;
const MAX_DEGREE: u32 = 1024;
const MAX_TERMS: usize = 50_000;
const MAX_DEPTH: usize = 128;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start_col = col;
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Int(chars[i..j].iter().collect()),
                line,
                col: start_col,
            });
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[i..j].iter().collect()),
                line,
                col: start_col,
            });
            col += j - i;
            i = j;
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Op(c),
                line,
                col: start_col,
            });
            i += 1;
            col += 1;
        } else {
            return Err(Error::parse(line, col, format!("unexpected character {c:?}")));
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    dvr: &'a Dvr,
    vars: &'a [String],
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(t.line, t.col, msg))
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn check_size(&self, p: &Poly, at: &Token) -> Result<()> {
        if p.terms().len() > MAX_TERMS || p.degree().unwrap_or(0) > MAX_DEGREE {
            return self.err(at, "expression too large");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Poly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek().clone();
            return self.err(&t, "expression nested too deeply");
        }
        let mut acc = self.term()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Op('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
            self.check_size(&acc, &t)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(&rhs);
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    let Some(c) = rhs.as_constant(self.dvr) else {
                        return self.err(&t, "division by a non-constant");
                    };
                    if c.is_zero() {
                        return self.err(&t, "division by zero");
                    }
                    acc = acc.scale(&c.inv());
                }
                _ => break,
            }
            self.check_size(&acc, &t)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Op('-') => {
                self.bump();
                self.nest(|p| p.unary()).map(|p| p.neg())
            }
            Tok::Op('+') => {
                self.bump();
                self.nest(|p| p.unary())
            }
            _ => self.power(),
        }
    }

    fn nest(&mut self, f: impl FnOnce(&mut Self) -> Result<Poly>) -> Result<Poly> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek().clone();
            return self.err(&t, "expression nested too deeply");
        }
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        let t = self.peek().clone();
        if t.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let e = self.bump();
        let Tok::Int(digits) = &e.tok else {
            return self.err(&e, "expected a non-negative integer exponent");
        };
        let k: u32 = match digits.parse() {
            Ok(k) if k <= MAX_EXPONENT => k,
            _ => return self.err(&e, format!("exponent exceeds {MAX_EXPONENT}")),
        };
        let growth = base.degree().unwrap_or(0).saturating_mul(k);
        if growth > MAX_DEGREE || (base.terms().len() > 1 && k > 64) {
            return self.err(&t, "expression too large");
        }
        let mut acc = Poly::constant(self.nvars(), self.dvr.one());
        for _ in 0..k {
            acc = acc.mul(&base);
            self.check_size(&acc, &t)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly> {
        let t = self.bump();
        match &t.tok {
            Tok::Int(d) => {
                let n: num_bigint::BigInt = d.parse().map_err(|_| {
                    Error::parse(t.line, t.col, "invalid integer literal")
                })?;
                if d.len() > 400 {
                    return self.err(&t, "integer literal too long");
                }
                Ok(Poly::constant(self.nvars(), self.dvr.from_bigint(&n)))
            }
            Tok::Ident(name) => {
                if let Some(i) = self.vars.iter().position(|v| v == name) {
                    return Ok(Poly::var(self.dvr, self.nvars(), i));
                }
                match name.as_str() {
                    "pi" => Ok(Poly::constant(self.nvars(), self.dvr.uniformizer())),
                    "gf" => match self.dvr.field_generator() {
                        Some(g) => Ok(Poly::constant(self.nvars(), g)),
                        None => self.err(&t, "gf is only defined over F_q with q not prime"),
                    },
                    _ => self.err(&t, format!("unknown name {name}")),
                }
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::Op(')') {
                    return self.err(&close, "expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.err(&t, "unexpected end of input"),
            Tok::Op(c) => self.err(&t, format!("unexpected {c:?}")),
        }
    }
}

fn run(dvr: &Dvr, vars: &[String], s: &str) -> Result<Poly> {
    let toks = lex(s)?;
    let mut p = Parser {
        dvr,
        vars,
        toks,
        pos: 0,
        depth: 0,
    };
    let out = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(out)
}

/// Parses a polynomial over the ring's variables.
pub fn parse_poly(ring: &PolyRing, s: &str) -> Result<Poly> {
    run(ring.dvr(), ring.vars(), s)
}

/// Parses an element of `K` (no variables), e.g. `1/691` or `pi^2 + 3`.
pub fn parse_scalar(dvr: &Dvr, s: &str) -> Result<Scalar> {
    let p = run(dvr, &[], s)?;
    Ok(p.as_constant(dvr).expect("a polynomial in no variables is constant"))
}
