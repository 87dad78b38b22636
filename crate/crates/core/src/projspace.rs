//! Points of projective space over a finite field.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// A point of `P^n`, always stored with its first nonzero coordinate equal
/// to one so that equality of classes is equality of vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjPoint {
    coords: Vec<Elem>,
}

impl ProjPoint {
    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Wraps coordinates already known to be normalized.
    pub(crate) fn from_normalized(coords: Vec<Elem>) -> ProjPoint {
        debug_assert!(coords.iter().find(|c| !c.is_zero()) == Some(&Elem::ONE));
        ProjPoint { coords }
    }

    /// Renders as `(c0:c1:...)` using the field's element syntax.
    pub fn display<'a>(&'a self, field: &'a Field) -> impl fmt::Display + 'a {
        DisplayPoint { point: self, field }
    }
}

struct DisplayPoint<'a> {
    point: &'a ProjPoint,
    field: &'a Field,
}

impl fmt::Display for DisplayPoint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &c) in self.point.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{}", self.field.format_elem(c))?;
        }
        write!(f, ")")
    }
}

/// Scales `raw` by the inverse of its first nonzero coordinate.
pub fn normalize(field: &Field, raw: &[Elem]) -> Result<ProjPoint> {
    for &c in raw {
        field.check(c)?;
    }
    let lead = raw
        .iter()
        .copied()
        .find(|c| !c.is_zero())
        .ok_or_else(|| Error::Invalid("the zero vector is not a projective point".into()))?;
    let s = field.inv(lead)?;
    Ok(ProjPoint {
        coords: raw.iter().map(|&c| field.mul(c, s)).collect(),
    })
}

/// Number of points of `P^n(F_q)`, `(q^{n+1} - 1)/(q - 1)`.
pub fn point_count(q: u64, n: usize) -> u128 {
    (0..=n as u32).map(|i| (q as u128).pow(i)).sum()
}

/// Index-addressable view of `P^n(F)` in enumeration order: points whose
/// leading one sits at coordinate 0 first (trailing coordinates as a base-q
/// number, first one most significant), then leading one at coordinate 1,
/// and so on.
#[derive(Clone, Debug)]
pub struct ProjSpace {
    field: Field,
    n: usize,
    // block_start[i] = index of the first point with leading one at i
    block_start: Vec<u64>,
    total: u64,
}

impl ProjSpace {
    pub fn new(field: &Field, n: usize, max_points: u64) -> Result<ProjSpace> {
        let q = field.size() as u64;
        let total = point_count(q, n);
        if total > max_points as u128 {
            return Err(Error::budget("projective point enumeration", total, max_points));
        }
        let mut block_start = Vec::with_capacity(n + 1);
        let mut acc = 0u64;
        for i in 0..=n {
            block_start.push(acc);
            acc += q.pow((n - i) as u32);
        }
        Ok(ProjSpace {
            field: field.clone(),
            n,
            block_start,
            total: total as u64,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn point_at(&self, index: u64) -> ProjPoint {
        assert!(index < self.total, "point index out of range");
        let lead = self.block_start.partition_point(|&s| s <= index) - 1;
        let mut rest = index - self.block_start[lead];
        let q = self.field.size() as u64;
        let mut coords = vec![Elem::ZERO; self.n + 1];
        coords[lead] = Elem::ONE;
        for slot in coords[lead + 1..].iter_mut().rev() {
            *slot = Elem::from_raw((rest % q) as u32);
            rest /= q;
        }
        ProjPoint { coords }
    }

    pub fn index_of(&self, point: &ProjPoint) -> u64 {
        let lead = point
            .coords
            .iter()
            .position(|c| !c.is_zero())
            .expect("normalized point");
        let q = self.field.size() as u64;
        let rest = point.coords[lead + 1..]
            .iter()
            .fold(0u64, |acc, c| acc * q + c.index() as u64);
        self.block_start[lead] + rest
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        PointIter::new(&self.field, self.n)
    }
}

/// Sequential enumeration with an odometer, avoiding per-point division.
struct PointIter {
    q: u32,
    coords: Vec<Elem>,
    lead: usize,
    done: bool,
}

impl PointIter {
    fn new(field: &Field, n: usize) -> PointIter {
        let mut coords = vec![Elem::ZERO; n + 1];
        coords[0] = Elem::ONE;
        PointIter {
            q: field.size(),
            coords,
            lead: 0,
            done: false,
        }
    }
}

impl Iterator for PointIter {
    type Item = ProjPoint;

    fn next(&mut self) -> Option<ProjPoint> {
        if self.done {
            return None;
        }
        let out = ProjPoint {
            coords: self.coords.clone(),
        };
        let n = self.coords.len() - 1;
        let mut pos = n;
        loop {
            if pos == self.lead {
                // odometer wrapped: move the leading one right
                self.coords[self.lead] = Elem::ZERO;
                self.lead += 1;
                if self.lead > n {
                    self.done = true;
                } else {
                    self.coords[self.lead] = Elem::ONE;
                }
                break;
            }
            let next = self.coords[pos].index() + 1;
            if next < self.q {
                self.coords[pos] = Elem::from_raw(next);
                break;
            }
            self.coords[pos] = Elem::ZERO;
            pos -= 1;
        }
        Some(out)
    }
}

/// Every point of `P^n(F)` exactly once, in enumeration order.
pub fn enumerate_points(field: &Field, n: usize, max_points: u64) -> Result<Vec<ProjPoint>> {
    let space = ProjSpace::new(field, n, max_points)?;
    Ok(space.iter().collect())
}
