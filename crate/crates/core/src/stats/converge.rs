use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{
    exact_distribution, mc_distribution, IntersectionHistogram, LimitVector, Rational, Strategy,
};
use crate::budget::Budget;
use crate::error::Result;
use crate::linsub::gaussian_binomial;
use crate::variety::VarietySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelMode {
    Exact,
    MonteCarlo { samples: u64 },
}

impl LevelMode {
    pub fn name(&self) -> &'static str {
        match self {
            LevelMode::Exact => "exact",
            LevelMode::MonteCarlo { .. } => "mc",
        }
    }

    /// Exact when the subspace count is at most `exact_threshold`, or when
    /// the pair-counting path applies and the lines fit the subspace cap.
    pub fn auto(spec: &VarietySpec, level: u32, samples: u64, budget: &Budget) -> LevelMode {
        let q = spec.field_size(level).to_u64().unwrap_or(u64::MAX);
        let r = (spec.n + 1 - spec.m) as u32;
        let total = gaussian_binomial(spec.n as u32 + 1, r, q)
            .to_u64()
            .unwrap_or(u64::MAX);
        let pair_path = spec.forms.len() == 1 && spec.n == spec.m + 1;
        if total <= budget.exact_threshold || (pair_path && total <= budget.max_subspaces) {
            LevelMode::Exact
        } else {
            LevelMode::MonteCarlo { samples }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRow {
    pub level: u32,
    /// `q^N`
    pub field_size: BigInt,
    pub mode: LevelMode,
    pub histogram: IntersectionHistogram,
    pub std_errors: Option<BTreeMap<usize, f64>>,
    pub deviation: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub spec: VarietySpec,
    pub rows: Vec<LevelRow>,
    pub limit: LimitVector,
    pub seed: u64,
}

/// One row per requested level, each compared with the limit vector of the
/// declared degree.
pub fn convergence_report(
    spec: &VarietySpec,
    plan: &[(u32, LevelMode)],
    seed: u64,
    budget: &Budget,
) -> Result<ConvergenceReport> {
    let limit = LimitVector::new(spec.d);
    let mut rows = Vec::with_capacity(plan.len());
    for &(level, mode) in plan {
        let (histogram, std_errors) = match mode {
            LevelMode::Exact => (exact_distribution(spec, level, Strategy::Auto, budget)?, None),
            LevelMode::MonteCarlo { samples } => {
                let r = mc_distribution(spec, level, samples, seed, budget)?;
                (r.histogram, Some(r.std_errors))
            }
        };
        rows.push(LevelRow {
            level,
            field_size: spec.field_size(level),
            mode,
            deviation: histogram.deviation(&limit),
            histogram,
            std_errors,
        });
    }
    Ok(ConvergenceReport {
        spec: spec.clone(),
        rows,
        limit,
        seed,
    })
}
