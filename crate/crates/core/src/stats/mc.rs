use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::IntersectionHistogram;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linsub::Grassmannian;
use crate::variety::{points_over, subspace_inside, VarietySpec};

/// Samples per random stream. Batch `b` draws from stream `b` of the
/// ChaCha8 generator seeded with the run seed, so results do not depend on
/// how batches are spread over threads.
pub const MC_BATCH: u64 = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct McResult {
    pub histogram: IntersectionHistogram,
    /// `sqrt(p(1-p)/samples)` for each reported index.
    pub std_errors: BTreeMap<usize, f64>,
    pub samples: u64,
    pub seed: u64,
}

pub(crate) fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

pub(crate) fn std_errors(
    counts: impl Iterator<Item = (usize, u64)>,
    samples: u64,
) -> BTreeMap<usize, f64> {
    counts
        .map(|(k, c)| {
            let p = c as f64 / samples as f64;
            (k, (p * (1.0 - p) / samples as f64).sqrt())
        })
        .collect()
}

/// Empirical intersection histogram from `samples` uniformly random
/// codimension-`m` subspaces.
pub fn mc_distribution(
    spec: &VarietySpec,
    level: u32,
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<McResult> {
    if samples == 0 {
        return Err(Error::Invalid("Monte Carlo needs at least one sample".into()));
    }
    let pts = points_over(spec, level, budget)?;
    let field = pts.field();
    let forms = spec.polys_over(field)?;
    let grass = Grassmannian::new(field, spec.n, spec.m, u64::MAX)?;
    let work = samples as u128 * pts.len().max(1) as u128;
    if work > budget.max_work as u128 {
        return Err(Error::budget("sampled incidence checks", work, budget.max_work));
    }
    let q = field.size() as u64;
    let batches = samples.div_ceil(MC_BATCH);
    let mut histogram = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let mut h = IntersectionHistogram::new(level);
            let draws = MC_BATCH.min(samples - b * MC_BATCH);
            for _ in 0..draws {
                let v = grass.sample(&mut rng);
                let k = pts
                    .points()
                    .iter()
                    .filter(|p| v.contains_coords(field, p.coords()))
                    .count();
                if k as u64 == v.point_count(q) && subspace_inside(&forms, &v)? {
                    h.record_contained();
                } else {
                    h.record(k);
                }
            }
            Ok::<_, Error>(h)
        })
        .try_reduce(|| IntersectionHistogram::new(level), |a, b| Ok(a.merge(b)))?;
    histogram.subspace_points = grass.subspace_at(0).point_count(q);
    histogram.check_mass()?;
    let std_errors = std_errors(
        histogram
            .report_range(spec.d)
            .map(|k| (k, histogram.count(k))),
        samples,
    );
    Ok(McResult {
        histogram,
        std_errors,
        samples,
        seed,
    })
}
