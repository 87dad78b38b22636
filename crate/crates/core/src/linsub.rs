//! Projective linear subspaces of `P^n` and the Grassmannians they form.
//!
//! A codimension-`m` subspace is the projectivization of an
//! `r = n + 1 - m` dimensional subspace of `F^{n+1}` and is stored as the
//! unique reduced row-echelon `r x (n+1)` matrix spanning it.
//!
//! Enumeration order: pivot-column patterns in colexicographic order, then
//! the free entries (row-major, first entry most significant) in element
//! order. [`Grassmannian::subspace_at`] and [`Grassmannian::index_of`] are
//! inverse bijections onto `0..len()` in that order.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::projspace::ProjPoint;

/// Number of `b`-dimensional subspaces of `F_Q^a`.
pub fn gaussian_binomial(a: u32, b: u32, q: u64) -> BigUint {
    assert!(b <= a, "gaussian_binomial needs b <= a");
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..b {
        num *= q.pow(a - i) - 1u32;
        den *= q.pow(b - i) - 1u32;
    }
    num / den
}

/// Reduces `rows` in place to reduced row-echelon form, dropping zero rows,
/// and returns the pivot columns.
pub fn rref(field: &Field, rows: &mut Vec<Vec<Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(src) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, src);
        let inv = field.inv(rows[rank][col]).expect("pivot is nonzero");
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(*x, field.mul(factor, p));
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    pivots
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearSubspace {
    n: usize,
    basis: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl LinearSubspace {
    /// Canonical subspace spanned by `rows` in `P^n`.
    pub fn from_rows(field: &Field, n: usize, rows: Vec<Vec<Elem>>) -> Result<LinearSubspace> {
        if rows.iter().any(|r| r.len() != n + 1) {
            return Err(Error::ContextMismatch(format!(
                "spanning rows must have {} coordinates",
                n + 1
            )));
        }
        for &c in rows.iter().flatten() {
            field.check(c)?;
        }
        let mut basis = rows;
        let pivots = rref(field, &mut basis);
        if basis.is_empty() {
            return Err(Error::Invalid("rows span the zero subspace".into()));
        }
        Ok(LinearSubspace { n, basis, pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.n + 1 - self.basis.len()
    }

    /// Projective dimension `n - m`.
    pub fn dim(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Membership of a raw coordinate vector, by reduction against the
    /// echelon rows.
    pub fn contains_coords(&self, field: &Field, x: &[Elem]) -> bool {
        let mut v = x.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            for (vi, &ri) in v.iter_mut().zip(row) {
                *vi = field.sub(*vi, field.mul(c, ri));
            }
        }
        v.iter().all(|c| c.is_zero())
    }

    pub fn contains(&self, field: &Field, point: &ProjPoint) -> Result<bool> {
        if point.coords().len() != self.n + 1 {
            return Err(Error::ContextMismatch(format!(
                "point of P^{} tested against a subspace of P^{}",
                point.dim(),
                self.n
            )));
        }
        for &c in point.coords() {
            field.check(c)?;
        }
        Ok(self.contains_coords(field, point.coords()))
    }

    /// Number of rational points, `(q^r - 1)/(q - 1)`.
    pub fn point_count(&self, q: u64) -> u64 {
        (0..self.basis.len() as u32).map(|i| q.pow(i)).sum()
    }

    /// Rational points of the subspace. Combinations whose first nonzero
    /// coefficient is one are already normalized because the basis is in
    /// reduced echelon form.
    pub fn points(&self, field: &Field) -> Vec<ProjPoint> {
        let r = self.basis.len();
        crate::projspace::ProjSpace::new(field, r - 1, u64::MAX)
            .expect("no budget")
            .iter()
            .map(|a| {
                let mut x = vec![Elem::ZERO; self.n + 1];
                for (coef, row) in a.coords().iter().zip(&self.basis) {
                    if coef.is_zero() {
                        continue;
                    }
                    for (xi, &ri) in x.iter_mut().zip(row) {
                        *xi = field.add(*xi, field.mul(*coef, ri));
                    }
                }
                ProjPoint::from_normalized(x)
            })
            .collect()
    }

    /// Basis rows in point syntax, e.g. `[(1:0:2), (0:1:1)]`.
    pub fn display<'a>(&'a self, field: &'a Field) -> impl fmt::Display + 'a {
        DisplaySubspace { v: self, field }
    }

    pub fn row_strings(&self, field: &Field) -> Vec<String> {
        self.basis
            .iter()
            .map(|row| ProjPoint::from_normalized(row.clone()).display(field).to_string())
            .collect()
    }
}

struct DisplaySubspace<'a> {
    v: &'a LinearSubspace,
    field: &'a Field,
}

impl fmt::Display for DisplaySubspace<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.v.row_strings(self.field).join(", "))
    }
}

#[derive(Clone, Debug)]
struct Pattern {
    pivots: Vec<usize>,
    // (row, column) of each free entry, row-major
    free: Vec<(usize, usize)>,
}

/// All codimension-`m` subspaces of `P^n(F)`.
#[derive(Clone, Debug)]
pub struct Grassmannian {
    field: Field,
    n: usize,
    m: usize,
    patterns: Vec<Pattern>,
    offsets: Vec<u64>,
    pattern_index: HashMap<Vec<usize>, usize>,
    total: u64,
}

fn colex_combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            rec(c + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

impl Grassmannian {
    pub fn new(field: &Field, n: usize, m: usize, max_subspaces: u64) -> Result<Grassmannian> {
        if m > n {
            return Err(Error::Invalid(format!(
                "codimension {m} exceeds ambient dimension {n}"
            )));
        }
        let r = n + 1 - m;
        let q = field.size() as u64;
        let total = gaussian_binomial((n + 1) as u32, r as u32, q);
        let total = match total.to_u64() {
            Some(t) if t <= max_subspaces => t,
            _ => {
                return Err(Error::budget(
                    "subspace enumeration",
                    total.to_u128().unwrap_or(u128::MAX),
                    max_subspaces,
                ))
            }
        };
        let mut patterns = Vec::new();
        let mut offsets = Vec::new();
        let mut pattern_index = HashMap::new();
        let mut acc = 0u64;
        for pivots in colex_combinations(n + 1, r) {
            let mut free = Vec::new();
            for (row, &pc) in pivots.iter().enumerate() {
                for col in pc + 1..=n {
                    if !pivots.contains(&col) {
                        free.push((row, col));
                    }
                }
            }
            offsets.push(acc);
            acc += q.pow(free.len() as u32);
            pattern_index.insert(pivots.clone(), patterns.len());
            patterns.push(Pattern { pivots, free });
        }
        if acc != total {
            return Err(Error::Internal(format!(
                "echelon patterns give {acc} subspaces, gaussian binomial {total}"
            )));
        }
        Ok(Grassmannian {
            field: field.clone(),
            n,
            m,
            patterns,
            offsets,
            pattern_index,
            total,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.n + 1 - self.m
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn subspace_at(&self, index: u64) -> LinearSubspace {
        assert!(index < self.total, "subspace index out of range");
        let pi = self.offsets.partition_point(|&o| o <= index) - 1;
        let pat = &self.patterns[pi];
        let mut rest = index - self.offsets[pi];
        let q = self.field.size() as u64;
        let r = pat.pivots.len();
        let mut basis = vec![vec![Elem::ZERO; self.n + 1]; r];
        for (row, &pc) in pat.pivots.iter().enumerate() {
            basis[row][pc] = Elem::ONE;
        }
        for &(row, col) in pat.free.iter().rev() {
            basis[row][col] = Elem::from_raw((rest % q) as u32);
            rest /= q;
        }
        LinearSubspace {
            n: self.n,
            basis,
            pivots: pat.pivots.clone(),
        }
    }

    pub fn index_of(&self, v: &LinearSubspace) -> Result<u64> {
        if v.n != self.n || v.codim() != self.m {
            return Err(Error::ContextMismatch(
                "subspace does not belong to this Grassmannian".into(),
            ));
        }
        Ok(self.index_of_echelon(&v.basis, &v.pivots))
    }

    pub(crate) fn index_of_echelon(&self, basis: &[Vec<Elem>], pivots: &[usize]) -> u64 {
        let pi = self.pattern_index[pivots];
        let q = self.field.size() as u64;
        let local = self.patterns[pi]
            .free
            .iter()
            .fold(0u64, |acc, &(row, col)| acc * q + basis[row][col].index() as u64);
        self.offsets[pi] + local
    }

    pub fn iter(&self) -> impl Iterator<Item = LinearSubspace> + '_ {
        (0..self.total).map(move |i| self.subspace_at(i))
    }

    /// Uniform sample: draw full matrices until one has full rank, then
    /// canonicalize. Each subspace has exactly `|GL_r(F)|` representing
    /// matrices, so the result is uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearSubspace {
        let q = self.field.size();
        let r = self.rank();
        loop {
            let mut rows: Vec<Vec<Elem>> = (0..r)
                .map(|_| {
                    (0..=self.n)
                        .map(|_| Elem::from_raw(rng.random_range(0..q)))
                        .collect()
                })
                .collect();
            let pivots = rref(&self.field, &mut rows);
            if rows.len() == r {
                return LinearSubspace {
                    n: self.n,
                    basis: rows,
                    pivots,
                };
            }
        }
    }
}

/// Every codimension-`m` subspace of `P^n(F)`, in enumeration order.
pub fn enumerate_subspaces(
    field: &Field,
    n: usize,
    m: usize,
    max_subspaces: u64,
) -> Result<impl Iterator<Item = LinearSubspace>> {
    let g = Grassmannian::new(field, n, m, max_subspaces)?;
    Ok((0..g.len()).map(move |i| g.subspace_at(i)))
}

pub fn sample_uniform<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    m: usize,
    rng: &mut R,
) -> Result<LinearSubspace> {
    Ok(Grassmannian::new(field, n, m, u64::MAX)?.sample(rng))
}

/// All incident pairs `(V, W)` with `V` of codimension `m`, `W` of
/// codimension `m - 1` and `V` inside `W`, grouped by `W` in enumeration
/// order. Empty for `m = 0`.
pub fn enumerate_nested_pairs(
    field: &Field,
    n: usize,
    m: usize,
    max_pairs: u64,
) -> Result<Vec<(LinearSubspace, LinearSubspace)>> {
    if m == 0 {
        return Ok(Vec::new());
    }
    let outer = Grassmannian::new(field, n, m - 1, max_pairs)?;
    let rw = outer.rank();
    // hyperplanes of W in W's own coordinates
    let inner = Grassmannian::new(field, rw - 1, 1, max_pairs)?;
    let total = outer.len() as u128 * inner.len() as u128;
    if total > max_pairs as u128 {
        return Err(Error::budget("nested pair enumeration", total, max_pairs));
    }
    let mut out = Vec::with_capacity(total as usize);
    for w in outer.iter() {
        for c in inner.iter() {
            let rows: Vec<Vec<Elem>> = c
                .basis()
                .iter()
                .map(|coefs| {
                    let mut x = vec![Elem::ZERO; n + 1];
                    for (&a, row) in coefs.iter().zip(w.basis()) {
                        for (xi, &wi) in x.iter_mut().zip(row) {
                            *xi = field.add(*xi, field.mul(a, wi));
                        }
                    }
                    x
                })
                .collect();
            let v = LinearSubspace::from_rows(field, n, rows)?;
            out.push((v, w.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projspace::{enumerate_points, normalize};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(3, 1, 2), BigUint::from(7u32));
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(3, 2, 3), BigUint::from(13u32));
        assert_eq!(gaussian_binomial(5, 0, 7), BigUint::one());
        for a in 0..6 {
            for b in 0..=a {
                assert_eq!(gaussian_binomial(a, b, 4), gaussian_binomial(a, a - b, 4));
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_subspaces(&f(3, 1), 2, 1, 1000).unwrap().count(), 13);
        assert_eq!(enumerate_subspaces(&f(2, 1), 3, 2, 1000).unwrap().count(), 35);
        let all: Vec<_> = enumerate_subspaces(&f(5, 1), 2, 0, 10).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].rank(), 3);
        assert!(Grassmannian::new(&f(3, 1), 3, 2, 10).is_err());
    }

    #[test]
    fn enumeration_is_distinct_and_indexed() {
        let field = f(3, 1);
        let g = Grassmannian::new(&field, 3, 2, 1 << 20).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (i, v) in g.iter().enumerate() {
            assert_eq!(g.index_of(&v).unwrap(), i as u64);
            let again = LinearSubspace::from_rows(&field, 3, v.basis().to_vec()).unwrap();
            assert_eq!(again, v);
            assert!(seen.insert(v));
        }
    }

    #[test]
    fn pivot_patterns_are_colex() {
        assert_eq!(
            colex_combinations(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(colex_combinations(4, 2)[3], vec![0, 3]);
    }

    #[test]
    fn membership_examples() {
        let f3 = f(3, 1);
        let x0 = LinearSubspace::from_rows(
            &f3,
            2,
            vec![
                vec![Elem::ZERO, Elem::ONE, Elem::ZERO],
                vec![Elem::ZERO, Elem::ZERO, Elem::ONE],
            ],
        )
        .unwrap();
        let p = normalize(&f3, &[Elem::ZERO, Elem::ONE, f3.from_int(2)]).unwrap();
        assert!(x0.contains(&f3, &p).unwrap());
        let l = LinearSubspace::from_rows(
            &f3,
            2,
            vec![
                vec![Elem::ONE, Elem::ZERO, Elem::ZERO],
                vec![Elem::ZERO, Elem::ZERO, Elem::ONE],
            ],
        )
        .unwrap();
        let q = normalize(&f3, &[Elem::ZERO, Elem::ONE, Elem::ZERO]).unwrap();
        assert!(!l.contains(&f3, &q).unwrap());
        let g = Grassmannian::new(&f3, 3, 1, 1000).unwrap();
        for v in g.iter() {
            for row in v.basis() {
                assert!(v.contains_coords(&f3, row));
            }
        }
    }

    #[test]
    fn subspace_points_match_membership_scan() {
        for (p, k) in [(2, 1), (3, 1), (2, 2)] {
            let field = f(p, k);
            let all = enumerate_points(&field, 3, 1 << 20).unwrap();
            for m in 0..=3 {
                for v in enumerate_subspaces(&field, 3, m, 1 << 20).unwrap().take(40) {
                    let pts = v.points(&field);
                    assert_eq!(pts.len() as u64, v.point_count(field.size() as u64));
                    let scanned: Vec<_> = all
                        .iter()
                        .filter(|pt| v.contains(&field, pt).unwrap())
                        .cloned()
                        .collect();
                    let mut sorted = pts.clone();
                    sorted.sort();
                    let mut scanned_sorted = scanned;
                    scanned_sorted.sort();
                    assert_eq!(sorted, scanned_sorted);
                }
            }
        }
    }

    #[test]
    fn nested_pairs() {
        assert_eq!(enumerate_nested_pairs(&f(2, 1), 2, 1, 1000).unwrap().len(), 7);
        let pairs = enumerate_nested_pairs(&f(2, 1), 3, 2, 1000).unwrap();
        assert_eq!(pairs.len(), 105);
        let field = f(2, 1);
        for (v, w) in &pairs {
            assert_eq!(v.codim(), 2);
            assert_eq!(w.codim(), 1);
            assert!(v.basis().iter().all(|row| w.contains_coords(&field, row)));
        }
        let distinct: std::collections::HashSet<_> = pairs.iter().cloned().collect();
        assert_eq!(distinct.len(), 105);
        assert!(enumerate_nested_pairs(&f(2, 1), 3, 0, 1000).unwrap().is_empty());
    }

    #[test]
    fn sampling_is_canonical_and_deterministic() {
        let field = f(3, 1);
        let g = Grassmannian::new(&field, 3, 2, 1 << 20).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| g.sample(&mut rng)).collect::<Vec<_>>()
        };
        let a = draw(7);
        assert_eq!(a, draw(7));
        for v in &a {
            let again = LinearSubspace::from_rows(&field, 3, v.basis().to_vec()).unwrap();
            assert_eq!(&again, v);
        }
        let full = Grassmannian::new(&field, 2, 0, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(full.sample(&mut rng).rank(), 3);
    }

    #[test]
    fn sampling_is_uniform_on_lines_of_fano_plane() {
        let field = f(2, 1);
        let g = Grassmannian::new(&field, 2, 1, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0u32; 7];
        for _ in 0..7000 {
            counts[g.index_of(&g.sample(&mut rng)).unwrap() as usize] += 1;
        }
        let sigma = (7000.0f64 * (1.0 / 7.0) * (6.0 / 7.0)).sqrt();
        for c in counts {
            assert!((c as f64 - 1000.0).abs() <= 5.0 * sigma, "{counts:?}");
        }
    }
}
