//! Absolute irreducibility of plane conics and cubics by linear-factor
//! search.
//!
//! A conic or cubic that factors over the algebraic closure has a linear
//! factor defined over an extension of degree at most `d`, so searching
//! `F_{q^j}` for `j = 1..=d` is complete. Within one field the search does
//! not walk all `q^2 + q + 1` linear forms: a factor
//! `x_i + sum_{j>i} c_j x_j` forces each `c_j` to be a root of the univariate
//! polynomial `f(x_i = -c, x_j = 1, rest = 0)`, which leaves at most `d^2`
//! candidates per leading variable, each verified by exact substitution.

use super::HomogPoly;
use crate::error::{Error, Result};
use crate::gf::{embedding, Elem, Field, MAX_FIELD_SIZE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorVerdict {
    AbsolutelyIrreducible,
    /// `witness` holds the normalized coefficients of a linear factor over
    /// `field`, the extension of degree `ext_degree` of the form's field.
    Factors {
        witness: Vec<Elem>,
        field: Field,
        ext_degree: u32,
    },
}

impl FactorVerdict {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, FactorVerdict::AbsolutelyIrreducible)
    }
}

/// Does `ell` (a linear form given by coefficients, with `ell[lead] = 1`)
/// divide `f`? Checked by substituting a parametrization of `Z(ell)`.
pub(crate) fn divides(f: &HomogPoly, ell: &[Elem]) -> Result<bool> {
    let field = f.field();
    let n = ell.len();
    let lead = ell
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::Invalid("zero linear form".into()))?;
    let inv = field.inv(ell[lead])?;
    let rows: Vec<Vec<Elem>> = (0..n)
        .filter(|&v| v != lead)
        .map(|v| {
            let mut row = vec![Elem::ZERO; n];
            row[v] = Elem::ONE;
            row[lead] = field.neg(field.mul(ell[v], inv));
            row
        })
        .collect();
    Ok(f.compose_linear(&rows)?.is_zero())
}

/// Roots in `field` of `sum coeffs[a] c^a`, in element order.
fn univariate_roots(field: &Field, coeffs: &[Elem]) -> Vec<Elem> {
    let deg = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
    let mut out = Vec::new();
    if deg == 0 {
        return out;
    }
    for c in field.elements() {
        let v = coeffs[..=deg]
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &a| field.add(field.mul(acc, c), a));
        if v.is_zero() {
            out.push(c);
            if out.len() == deg {
                break;
            }
        }
    }
    out
}

fn search_field(f: &HomogPoly) -> Result<Option<Vec<Elem>>> {
    let field = f.field();
    let n = f.n_vars();
    let d = f.degree() as usize;
    // Coordinate hyperplanes first; afterwards none of the univariate
    // restrictions below can vanish identically.
    for v in 0..n {
        let mut ell = vec![Elem::ZERO; n];
        ell[v] = Elem::ONE;
        if divides(f, &ell)? {
            return Ok(Some(ell));
        }
    }
    for lead in 0..n {
        let tail: Vec<usize> = (lead + 1..n).collect();
        if tail.is_empty() {
            break;
        }
        let mut candidates: Vec<Vec<Elem>> = Vec::with_capacity(tail.len());
        for &j in &tail {
            // u(c) = f(x_lead = -c, x_j = 1, others 0)
            let mut u = vec![Elem::ZERO; d + 1];
            for (e, coeff) in f.terms() {
                if e.iter()
                    .enumerate()
                    .any(|(v, &x)| x > 0 && v != lead && v != j)
                {
                    continue;
                }
                let a = e[lead] as usize;
                let signed = if a % 2 == 1 { field.neg(coeff) } else { coeff };
                u[a] = field.add(u[a], signed);
            }
            let roots = univariate_roots(field, &u);
            if roots.is_empty() {
                candidates.clear();
                break;
            }
            candidates.push(roots);
        }
        if candidates.len() != tail.len() {
            continue;
        }
        // cartesian product over the tail coefficients
        let mut idx = vec![0usize; tail.len()];
        'product: loop {
            let mut ell = vec![Elem::ZERO; n];
            ell[lead] = Elem::ONE;
            for (t, &j) in tail.iter().enumerate() {
                ell[j] = candidates[t][idx[t]];
            }
            if divides(f, &ell)? {
                return Ok(Some(ell));
            }
            let mut pos = tail.len();
            loop {
                if pos == 0 {
                    break 'product;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < candidates[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    Ok(None)
}

/// Searches for a linear factor of a ternary conic or cubic over
/// `F_{q^j}`, `j = 1..=d`. Extensions larger than `max_field` are a budget
/// error.
pub fn linear_factor_search(f: &HomogPoly, max_field: u64) -> Result<FactorVerdict> {
    if f.n_vars() != 3 {
        return Err(Error::Invalid(format!(
            "linear factor search needs a ternary form, got {} variables",
            f.n_vars()
        )));
    }
    let d = f.degree();
    if !(2..=3).contains(&d) {
        return Err(Error::UnsupportedDegree(d));
    }
    if f.is_zero() {
        return Err(Error::Invalid("the zero form has no factorization".into()));
    }
    let base = f.field();
    let cap = max_field.min(MAX_FIELD_SIZE);
    for j in 1..=d {
        let ext_degree = base.degree() * j;
        let size = (base.characteristic() as u128).checked_pow(ext_degree).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::budget("linear factor search field", size, cap));
        }
        let ext = Field::new(base.characteristic() as u64, ext_degree)?;
        let lifted = if j == 1 {
            f.clone()
        } else {
            f.embed(&*embedding(base, &ext)?)?
        };
        if let Some(witness) = search_field(&lifted)? {
            return Ok(FactorVerdict::Factors {
                witness,
                field: ext,
                ext_degree: j,
            });
        }
    }
    Ok(FactorVerdict::AbsolutelyIrreducible)
}
