//! Sparse homogeneous polynomials over a finite field, their restrictions to
//! lines, and root-multiplicity computations on binary forms.

pub(crate) mod binary;
mod factor;
mod parse;

use std::collections::BTreeMap;

pub use binary::{restrict_to_line, root_multiplicities, splitting_pattern, BinaryForm};
pub use factor::{linear_factor_search, FactorVerdict};
pub use parse::parse_poly;

use crate::error::{Error, Result};
use crate::gf::{Elem, Embedding, Field};
use crate::projspace::ProjPoint;

pub(crate) type TermMap = BTreeMap<Vec<u32>, Elem>;

/// Homogeneous polynomial in `n_vars` variables. The zero polynomial keeps
/// its declared degree with an empty term map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogPoly {
    field: Field,
    n_vars: usize,
    degree: u32,
    terms: TermMap,
}

impl HomogPoly {
    pub fn zero(field: &Field, n_vars: usize, degree: u32) -> HomogPoly {
        HomogPoly {
            field: field.clone(),
            n_vars,
            degree,
            terms: TermMap::new(),
        }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials and dropping zero coefficients.
    pub fn from_terms<I>(field: &Field, n_vars: usize, degree: u32, terms: I) -> Result<HomogPoly>
    where
        I: IntoIterator<Item = (Vec<u32>, Elem)>,
    {
        let mut map = TermMap::new();
        for (exps, c) in terms {
            field.check(c)?;
            if exps.len() != n_vars {
                return Err(Error::ContextMismatch(format!(
                    "monomial has {} exponents, expected {n_vars}",
                    exps.len()
                )));
            }
            let deg: u32 = exps.iter().sum();
            if deg != degree {
                return Err(Error::NonHomogeneous(degree, deg));
            }
            add_term(field, &mut map, exps, c);
        }
        Ok(HomogPoly {
            field: field.clone(),
            n_vars,
            degree,
            terms: map,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Elem)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> Elem {
        self.terms.get(exps).copied().unwrap_or(Elem::ZERO)
    }

    /// Value at a coordinate vector (no projective normalization needed).
    pub fn eval_coords(&self, x: &[Elem]) -> Elem {
        let f = &self.field;
        let d = self.degree as usize;
        // powers[v][e] = x_v^e
        let powers: Vec<Vec<Elem>> = x
            .iter()
            .map(|&xv| {
                let mut row = Vec::with_capacity(d + 1);
                let mut acc = Elem::ONE;
                for _ in 0..=d {
                    row.push(acc);
                    acc = f.mul(acc, xv);
                }
                row
            })
            .collect();
        self.terms.iter().fold(Elem::ZERO, |acc, (exps, &c)| {
            let m = exps
                .iter()
                .enumerate()
                .fold(c, |m, (v, &e)| f.mul(m, powers[v][e as usize]));
            f.add(acc, m)
        })
    }

    /// `f(P)` for a point over the same field.
    pub fn evaluate(&self, point: &ProjPoint) -> Result<Elem> {
        if point.coords().len() != self.n_vars {
            return Err(Error::ContextMismatch(format!(
                "point in P^{} but polynomial has {} variables",
                point.dim(),
                self.n_vars
            )));
        }
        for &c in point.coords() {
            self.field.check(c)?;
        }
        Ok(self.eval_coords(point.coords()))
    }

    /// Same polynomial with coefficients pushed through a field embedding.
    pub fn embed(&self, emb: &Embedding) -> Result<HomogPoly> {
        if emb.source() != &self.field {
            return Err(Error::ContextMismatch(format!(
                "embedding starts at {:?}, polynomial lives over {:?}",
                emb.source(),
                self.field
            )));
        }
        Ok(HomogPoly {
            field: emb.target().clone(),
            n_vars: self.n_vars,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.clone(), emb.apply(c)))
                .collect(),
        })
    }

    /// Substitutes `x_j = sum_i rows[i][j] * y_i`, giving a form of the same
    /// degree in `rows.len()` variables.
    pub fn compose_linear(&self, rows: &[Vec<Elem>]) -> Result<HomogPoly> {
        let f = &self.field;
        if rows.iter().any(|r| r.len() != self.n_vars) {
            return Err(Error::ContextMismatch(
                "substitution rows must have one entry per variable".into(),
            ));
        }
        let r = rows.len();
        let linear: Vec<TermMap> = (0..self.n_vars)
            .map(|j| {
                let mut m = TermMap::new();
                for (i, row) in rows.iter().enumerate() {
                    let mut e = vec![0u32; r];
                    e[i] = 1;
                    add_term(f, &mut m, e, row[j]);
                }
                m
            })
            .collect();
        // powers[j][e] = (linear form j)^e, built lazily up to degree
        let d = self.degree as usize;
        let mut unit = TermMap::new();
        unit.insert(vec![0u32; r], Elem::ONE);
        let mut powers: Vec<Vec<TermMap>> = vec![vec![unit]; self.n_vars];
        let mut out = TermMap::new();
        for (exps, &c) in &self.terms {
            let mut acc = TermMap::new();
            acc.insert(vec![0u32; r], c);
            for (j, &e) in exps.iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = mul_terms(f, powers[j].last().unwrap(), &linear[j]);
                    powers[j].push(next);
                }
                if e > 0 {
                    acc = mul_terms(f, &acc, &powers[j][e as usize]);
                }
            }
            for (e, c) in acc {
                add_term(f, &mut out, e, c);
            }
        }
        debug_assert!(powers.iter().all(|p| p.len() <= d + 1));
        Ok(HomogPoly {
            field: f.clone(),
            n_vars: r,
            degree: self.degree,
            terms: out,
        })
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> HomogPoly {
        let f = &self.field;
        let mut terms = TermMap::new();
        for (exps, &c) in &self.terms {
            let e = exps[var];
            if e == 0 {
                continue;
            }
            let mut ne = exps.clone();
            ne[var] -= 1;
            add_term(f, &mut terms, ne, f.mul(c, f.from_int(e as i64)));
        }
        HomogPoly {
            field: f.clone(),
            n_vars: self.n_vars,
            degree: self.degree.saturating_sub(1),
            terms,
        }
    }

    /// Whether every formal partial derivative vanishes at `x`.
    pub fn is_singular_at(&self, x: &[Elem]) -> bool {
        (0..self.n_vars).all(|v| self.partial(v).eval_coords(x).is_zero())
    }

    /// Text in the parser's grammar, integer coefficients only; panics for
    /// coefficients outside the prime subfield.
    pub fn to_expr(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (exps, &c) in self.terms.iter().rev() {
            assert!(
                c.index() < self.field.characteristic(),
                "coefficient outside the prime subfield"
            );
            let mut factors = Vec::new();
            if c != Elem::ONE || exps.iter().all(|&e| e == 0) {
                factors.push(c.index().to_string());
            }
            for (v, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{v}")),
                    _ => factors.push(format!("x{v}^{e}")),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

pub(crate) fn add_term(field: &Field, map: &mut TermMap, exps: Vec<u32>, c: Elem) {
    if c.is_zero() {
        return;
    }
    match map.entry(exps) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = field.add(*o.get(), c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub(crate) fn mul_terms(field: &Field, a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_term(field, &mut out, e, field.mul(ca, cb));
        }
    }
    out
}
