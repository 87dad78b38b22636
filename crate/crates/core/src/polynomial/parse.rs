//! Expression grammar for forms:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' INT)?
//! atom  := INT | 'x' DIGITS | '(' expr ')'
//! ```
//!
//! Integer literals are reduced into the prime subfield. Exponents are
//! literal nonnegative integers. Juxtaposition is a syntax error.

use super::{add_term, mul_terms, HomogPoly, TermMap};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

const MAX_DEGREE: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str, n_vars: usize) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' | '\u{2212}' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(chars[start..i].iter().collect())));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let idx = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&v| v < n_vars)
                    .ok_or(Error::UnknownVariable(name))?;
                out.push((start, Tok::Var(idx)));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    field: &'a Field,
    n_vars: usize,
}

/// Possibly inhomogeneous intermediate value.
type Poly = TermMap;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn constant(&self, c: Elem) -> Poly {
        let mut m = Poly::new();
        add_term(self.field, &mut m, vec![0; self.n_vars], c);
        m
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    for (e, c) in rhs {
                        add_term(self.field, &mut acc, e, c);
                    }
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    for (e, c) in rhs {
                        add_term(self.field, &mut acc, e, self.field.neg(c));
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = mul_terms(self.field, &acc, &rhs);
            self.check_degree(&acc)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(inner
                    .into_iter()
                    .map(|(e, c)| (e, self.field.neg(c)))
                    .collect())
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Int(s)) => match s.parse::<u32>() {
                    Ok(e) if e <= MAX_DEGREE => e,
                    _ => return self.err(format!("exponent must be at most {MAX_DEGREE}")),
                },
                _ => return self.err("expected a nonnegative integer exponent"),
            };
            self.pos += 1;
            let mut acc = self.constant(Elem::ONE);
            for _ in 0..e {
                acc = mul_terms(self.field, &acc, &base);
                self.check_degree(&acc)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Int(s)) => {
                self.pos += 1;
                let p = self.field.characteristic() as u64;
                let r = s
                    .bytes()
                    .fold(0u64, |acc, b| (acc * 10 + (b - b'0') as u64) % p);
                Ok(self.constant(self.field.from_int(r as i64)))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                let mut e = vec![0; self.n_vars];
                e[v] = 1;
                let mut m = Poly::new();
                m.insert(e, Elem::ONE);
                Ok(m)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }

    fn check_degree(&self, p: &Poly) -> Result<()> {
        if p.keys().any(|e| e.iter().sum::<u32>() > MAX_DEGREE) {
            return self.err(format!("degree exceeds {MAX_DEGREE}"));
        }
        Ok(())
    }
}

/// Parses a form in variables `x0..xn` over `field`.
pub fn parse_poly(src: &str, n: usize, field: &Field) -> Result<HomogPoly> {
    let n_vars = n + 1;
    let toks = lex(src, n_vars)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.chars().count(),
        field,
        n_vars,
    };
    let poly = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return parser.err("unexpected token (implicit multiplication is not allowed)");
    }
    let mut degrees = poly.keys().map(|e| e.iter().sum::<u32>());
    let degree = match degrees.next() {
        Some(d) => d,
        None => {
            return Err(Error::Invalid(format!(
                "`{src}` is the zero polynomial over {field:?}"
            )))
        }
    };
    if let Some(other) = degrees.find(|&d| d != degree) {
        return Err(Error::NonHomogeneous(degree, other));
    }
    HomogPoly::from_terms(field, n_vars, degree, poly)
}
