use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use super::mc::{batch_rng, std_errors};
use super::{to_f64, IntersectionHistogram, LimitVector, MC_BATCH};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::polynomial::{linear_factor_search, HomogPoly};
use crate::variety::{points_over, VarietySpec};

const CONIC_MONOMIALS: [[u32; 3]; 6] = [
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
];

/// Uniform nonzero ternary quadratic form; uniform on conics up to scalar.
pub fn random_conic<R: Rng + ?Sized>(field: &Field, rng: &mut R) -> HomogPoly {
    loop {
        let coeffs: Vec<Elem> = (0..6)
            .map(|_| field.elem(rng.random_range(0..field.size())).expect("in range"))
            .collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let terms = CONIC_MONOMIALS.iter().map(|e| e.to_vec()).zip(coeffs);
        return HomogPoly::from_terms(field, 3, 2, terms).expect("well-formed conic");
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub level: u32,
    pub samples: u64,
    pub seed: u64,
    /// Reducible conics drawn and discarded.
    pub rejected: u64,
    /// Counts of `|X ∩ Z(g)|`; conics sharing a component with X go to
    /// `contained`.
    pub histogram: IntersectionHistogram,
    pub std_errors: BTreeMap<usize, f64>,
    pub prediction: LimitVector,
}

impl ProbeReport {
    /// `max_k |freq_k - prediction_k|` as a float.
    pub fn deviation(&self) -> f64 {
        self.histogram
            .report_range(self.prediction.degree())
            .map(|k| {
                let freq = self.histogram.count(k) as f64 / self.samples as f64;
                (freq - to_f64(&self.prediction.get(k))).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Intersections of a plane curve with random absolutely irreducible conics
/// over `F_{q^N}`, beside the predicted limit for `e = 2`.
pub fn conjecture_probe(
    spec: &VarietySpec,
    e: u32,
    level: u32,
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<ProbeReport> {
    if e != 2 {
        return Err(Error::Invalid(format!(
            "only conics are supported as random curves, got degree e={e}"
        )));
    }
    if spec.n != 2 || spec.m != 1 || spec.forms.len() != 1 {
        return Err(Error::Invalid(
            "the conjecture probe needs a plane curve given by one form".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Invalid("the probe needs at least one sample".into()));
    }
    let pts = points_over(spec, level, budget)?;
    let field = pts.field();
    let work = samples as u128 * pts.len().max(1) as u128;
    if work > budget.max_work as u128 {
        return Err(Error::budget("probe incidence checks", work, budget.max_work));
    }
    let curve = spec.polys_over(field)?.remove(0);
    // finite intersections of a degree-d curve with a conic have at most 2d points
    let bezout = 2 * spec.d as usize;
    let batches = samples.div_ceil(MC_BATCH);
    let (histogram, rejected) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let mut h = IntersectionHistogram::new(level);
            let mut rejected = 0u64;
            let draws = MC_BATCH.min(samples - b * MC_BATCH);
            for _ in 0..draws {
                let g = loop {
                    let g = random_conic(field, &mut rng);
                    if linear_factor_search(&g, budget.max_field_size)?.is_irreducible() {
                        break g;
                    }
                    rejected += 1;
                };
                let k = pts
                    .points()
                    .iter()
                    .filter(|p| g.eval_coords(p.coords()).is_zero())
                    .count();
                if k > bezout || proportional(&curve, &g) {
                    h.record_contained();
                } else {
                    h.record(k);
                }
            }
            Ok::<_, Error>((h, rejected))
        })
        .try_reduce(
            || (IntersectionHistogram::new(level), 0),
            |a, b| Ok((a.0.merge(b.0), a.1 + b.1)),
        )?;
    histogram.check_mass()?;
    let prediction = LimitVector::conjecture(spec.d, e)?;
    let std_errors = std_errors(
        histogram
            .report_range(prediction.degree())
            .map(|k| (k, histogram.count(k))),
        samples,
    );
    Ok(ProbeReport {
        level,
        samples,
        seed,
        rejected,
        histogram,
        std_errors,
        prediction,
    })
}

fn proportional(f: &HomogPoly, g: &HomogPoly) -> bool {
    if f.degree() != g.degree() || f.terms().count() != g.terms().count() {
        return false;
    }
    let field = f.field();
    let Some((e, c)) = f.terms().next() else {
        return false;
    };
    let Ok(scale) = field.div(g.coeff(e), c) else {
        return false;
    };
    !scale.is_zero() && f.terms().all(|(e, c)| g.coeff(e) == field.mul(scale, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_poly;

    fn line() -> VarietySpec {
        VarietySpec::parse("p=3\ne=1\nn=2\nm=1\nd=1\npoly=\"x0\"").unwrap()
    }

    #[test]
    fn reducible_samples_are_rejected() {
        let f3 = Field::new(3, 1).unwrap();
        let g = parse_poly("x0*x1", 2, &f3).unwrap();
        assert!(!linear_factor_search(&g, 1 << 24).unwrap().is_irreducible());
        let r = conjecture_probe(&line(), 2, 1, 500, 3, &Budget::default()).unwrap();
        assert!(r.rejected > 0);
        assert_eq!(r.histogram.total, 500);
        assert!(r.histogram.max_key().unwrap() <= 2);
    }

    #[test]
    fn deterministic() {
        let b = Budget::default();
        let a = conjecture_probe(&line(), 2, 2, 700, 11, &b).unwrap();
        let c = conjecture_probe(&line(), 2, 2, 700, 11, &b).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_bad_requests() {
        let b = Budget::default();
        assert!(conjecture_probe(&line(), 3, 1, 10, 0, &b).is_err());
        assert!(conjecture_probe(&line(), 2, 1, 0, 0, &b).is_err());
        let surface = VarietySpec::parse("p=3\ne=1\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"").unwrap();
        assert!(conjecture_probe(&surface, 2, 1, 10, 0, &b).is_err());
    }

    #[test]
    fn conic_against_itself_is_contained() {
        // over F_2 the sampler often redraws X itself, which must land in
        // the contained bucket even though X has only 3 points
        let x = VarietySpec::parse("p=2\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x2 + x1^2\"").unwrap();
        let r = conjecture_probe(&x, 2, 1, 2000, 5, &Budget::default()).unwrap();
        assert!(r.histogram.max_key().unwrap() <= 4);
        assert!(r.histogram.contained > 0);
        r.histogram.check_mass().unwrap();
        let f2 = Field::new(2, 1).unwrap();
        let f = parse_poly("x0*x2 + x1^2", 2, &f2).unwrap();
        assert!(proportional(&f, &f));
        assert!(!proportional(&f, &parse_poly("x0*x2 + x1^2 + x0^2", 2, &f2).unwrap()));
    }
}
