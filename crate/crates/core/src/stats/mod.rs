//! Intersection statistics: exact and sampled distributions of
//! `|X(F_{q^N}) ∩ V(F_{q^N})|`, their limits, and convergence tables.

mod converge;
mod exact;
mod mc;
mod probe;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use converge::{convergence_report, ConvergenceReport, LevelMode, LevelRow};
pub use exact::{exact_distribution, Strategy};
pub use mc::{mc_distribution, McResult, MC_BATCH};
pub use probe::{conjecture_probe, random_conic, ProbeReport};

pub type Rational = BigRational;

pub fn rational(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * i)
}

fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn truncated_sum(top: u32, k: u32) -> Rational {
    let mut acc = Rational::zero();
    for s in k..=top {
        let term = Rational::new(binomial(s, k), factorial(s));
        if (k + s).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `sum_{s=k}^{d} (-1)^{k+s} C(s,k) / s!`
pub fn closed_form_pk(d: u32, k: u32) -> Result<Rational> {
    if k > d {
        return Err(Error::Invalid(format!("k={k} exceeds the degree d={d}")));
    }
    Ok(truncated_sum(d, k))
}

/// The same sum truncated at `d·e`.
pub fn closed_form_conjecture(d: u32, e: u32, k: u32) -> Result<Rational> {
    let top = d
        .checked_mul(e)
        .ok_or_else(|| Error::Invalid("d·e overflows".into()))?;
    if k > top {
        return Err(Error::Invalid(format!("k={k} exceeds d·e={top}")));
    }
    Ok(truncated_sum(top, k))
}

/// Limit probabilities `p_0..p_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitVector {
    d: u32,
    values: Vec<Rational>,
}

impl LimitVector {
    pub fn new(d: u32) -> LimitVector {
        LimitVector {
            d,
            values: (0..=d).map(|k| truncated_sum(d, k)).collect(),
        }
    }

    /// Limit vector predicted for intersections with degree-`e` curves.
    pub fn conjecture(d: u32, e: u32) -> Result<LimitVector> {
        let top = d
            .checked_mul(e)
            .ok_or_else(|| Error::Invalid("d·e overflows".into()))?;
        Ok(LimitVector::new(top))
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `p_k`, zero past the top index.
    pub fn get(&self, k: usize) -> Rational {
        self.values.get(k).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Subspace counts by number of rational intersection points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionHistogram {
    #[serde(rename = "N")]
    pub level: u32,
    pub total: u64,
    /// Only nonzero entries are stored.
    pub counts: BTreeMap<usize, u64>,
    /// Subspaces lying inside X, kept out of every `p_k`.
    pub contained: u64,
    /// Rational points on each subspace of the family.
    pub subspace_points: u64,
}

impl IntersectionHistogram {
    pub fn new(level: u32) -> IntersectionHistogram {
        IntersectionHistogram {
            level,
            total: 0,
            counts: BTreeMap::new(),
            contained: 0,
            subspace_points: 0,
        }
    }

    pub fn record(&mut self, k: usize) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn record_contained(&mut self) {
        self.contained += 1;
        self.total += 1;
    }

    pub fn merge(mut self, other: IntersectionHistogram) -> IntersectionHistogram {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
        self.contained += other.contained;
        self.subspace_points = self.subspace_points.max(other.subspace_points);
        self
    }

    /// Counts with each contained subspace filed under its number of
    /// rational points.
    pub fn set_theoretic_counts(&self) -> BTreeMap<usize, u64> {
        let mut out = self.counts.clone();
        if self.contained > 0 {
            *out.entry(self.subspace_points as usize).or_insert(0) += self.contained;
        }
        out
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn max_key(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// `count(k) / total`.
    pub fn probability(&self, k: usize) -> Rational {
        if self.total == 0 {
            return Rational::zero();
        }
        rational(self.count(k), self.total)
    }

    /// Keys `0..=max(d, max_key)`, the range every report shows.
    pub fn report_range(&self, d: u32) -> std::ops::RangeInclusive<usize> {
        0..=self.max_key().unwrap_or(0).max(d as usize)
    }

    pub fn check_mass(&self) -> Result<()> {
        let sum: u64 = self.counts.values().sum::<u64>() + self.contained;
        if sum != self.total {
            return Err(Error::Internal(format!(
                "histogram mass {sum} differs from total {}",
                self.total
            )));
        }
        Ok(())
    }

    /// `max_k |p_k^N - p_k|` over every reported index.
    pub fn deviation(&self, limit: &LimitVector) -> Rational {
        self.report_range(limit.degree())
            .map(|k| (self.probability(k) - limit.get(k)).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}
