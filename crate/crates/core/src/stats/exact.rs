use std::sync::atomic::{AtomicU8, Ordering};

use rayon::prelude::*;

use super::IntersectionHistogram;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::linsub::{rref, Grassmannian, LinearSubspace};
use crate::polynomial::HomogPoly;
use crate::variety::{points_over, subspace_inside, vanishes_on, PointSet, VarietySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Pair counting for hypersurfaces sliced by lines, generic otherwise.
    Auto,
    /// Every subspace against every point.
    Generic,
    /// Count point pairs per line.
    PairCount,
}

const SUBSPACE_CHUNK: u64 = 1 << 10;

/// Exact histogram of intersection counts over all codimension-`m`
/// subspaces of `P^n(F_{q^N})`.
pub fn exact_distribution(
    spec: &VarietySpec,
    level: u32,
    strategy: Strategy,
    budget: &Budget,
) -> Result<IntersectionHistogram> {
    let pair_ok = spec.forms.len() == 1 && spec.n == spec.m + 1;
    let use_pairs = match strategy {
        Strategy::Auto => pair_ok,
        Strategy::Generic => false,
        Strategy::PairCount if pair_ok => true,
        Strategy::PairCount => {
            return Err(Error::Invalid(
                "pair counting needs a hypersurface sliced by lines".into(),
            ))
        }
    };
    let pts = points_over(spec, level, budget)?;
    let forms = spec.polys_over(pts.field())?;
    let hist = if use_pairs {
        pair_count(&pts, &forms, spec.m, budget)?
    } else {
        generic(&pts, &forms, spec.m, budget)?
    };
    let mut hist = hist;
    hist.subspace_points = (0..(spec.n + 1 - spec.m) as u32)
        .map(|i| (pts.field().size() as u64).pow(i))
        .sum();
    hist.check_mass()?;
    Ok(hist)
}

/// Classifies a subspace meeting X in `k` points: contained if it has no
/// points off X and every form vanishes on it.
fn classify(
    hist: &mut IntersectionHistogram,
    forms: &[HomogPoly],
    v: &LinearSubspace,
    k: usize,
    q: u64,
) -> Result<()> {
    if k as u64 == v.point_count(q) && subspace_inside(forms, v)? {
        hist.record_contained();
    } else {
        hist.record(k);
    }
    Ok(())
}

fn generic(
    pts: &PointSet,
    forms: &[HomogPoly],
    m: usize,
    budget: &Budget,
) -> Result<IntersectionHistogram> {
    let field = pts.field();
    let grass = Grassmannian::new(field, pts.ambient_dim(), m, budget.max_subspaces)?;
    let work = grass.len() as u128 * pts.len().max(1) as u128;
    if work > budget.max_work as u128 {
        return Err(Error::budget("subspace-point incidence checks", work, budget.max_work));
    }
    let q = field.size() as u64;
    let chunks = grass.len().div_ceil(SUBSPACE_CHUNK);
    let level = pts.level();
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = IntersectionHistogram::new(level);
            let end = ((c + 1) * SUBSPACE_CHUNK).min(grass.len());
            for i in c * SUBSPACE_CHUNK..end {
                let v = grass.subspace_at(i);
                let k = pts
                    .points()
                    .iter()
                    .filter(|p| v.contains_coords(field, p.coords()))
                    .count();
                classify(&mut h, forms, &v, k, q)?;
            }
            Ok(h)
        })
        .try_reduce(|| IntersectionHistogram::new(level), |a, b| Ok(a.merge(b)))
}

/// `j` with `C(j, 2) = c`.
fn pair_root(c: u64) -> Option<u64> {
    let j = ((1.0 + (1.0 + 8.0 * c as f64).sqrt()) / 2.0).round() as u64;
    (j * (j - 1) / 2 == c).then_some(j)
}

fn pair_count(
    pts: &PointSet,
    forms: &[HomogPoly],
    m: usize,
    budget: &Budget,
) -> Result<IntersectionHistogram> {
    let field = pts.field();
    let n = pts.ambient_dim();
    let lines = Grassmannian::new(field, n, m, budget.max_subspaces)?;
    let np = pts.len() as u64;
    let pairs = np as u128 * np.saturating_sub(1) as u128 / 2;
    if pairs > budget.max_work as u128 {
        return Err(Error::budget("point pairs", pairs, budget.max_work));
    }
    let tally: Vec<AtomicU8> = (0..lines.len()).map(|_| AtomicU8::new(0)).collect();
    let points = pts.points();
    (0..points.len()).into_par_iter().for_each(|i| {
        let mut rows = Vec::with_capacity(2);
        for j in i + 1..points.len() {
            rows.clear();
            rows.push(points[i].coords().to_vec());
            rows.push(points[j].coords().to_vec());
            let pivots = rref(field, &mut rows);
            let idx = lines.index_of_echelon(&rows, &pivots);
            let _ = tally[idx as usize].fetch_update(Ordering::Relaxed, Ordering::Relaxed, |c| {
                c.checked_add(1)
            });
        }
    });

    let q = field.size() as u64;
    let level = pts.level();
    let chunks = lines.len().div_ceil(SUBSPACE_CHUNK);
    // per chunk: histogram of lines with at least two points, and their
    // total incidence count
    let (multi, incidences) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = IntersectionHistogram::new(level);
            let mut inc = 0u128;
            let end = ((c + 1) * SUBSPACE_CHUNK).min(lines.len());
            for i in c * SUBSPACE_CHUNK..end {
                let c = tally[i as usize].load(Ordering::Relaxed) as u64;
                if c == 0 {
                    continue;
                }
                let line = lines.subspace_at(i);
                let k = match pair_root(c) {
                    Some(j) if c < u8::MAX as u64 => j as usize,
                    _ => recount(field, forms, &line),
                };
                if k < 2 {
                    return Err(Error::Internal(format!(
                        "line {i} has {c} point pairs but {k} points"
                    )));
                }
                inc += k as u128;
                classify(&mut h, forms, &line, k, q)?;
            }
            Ok((h, inc))
        })
        .try_reduce(
            || (IntersectionHistogram::new(level), 0u128),
            |a, b| Ok((a.0.merge(b.0), a.1 + b.1)),
        )?;

    // each point lies on (Q^n - 1)/(Q - 1) lines
    let through_point: u128 = (0..n as u32).map(|i| (q as u128).pow(i)).sum();
    let all_incidences = np as u128 * through_point;
    let ones = all_incidences
        .checked_sub(incidences)
        .ok_or_else(|| Error::Internal("more incidences on secants than in total".into()))?;
    let zeros = (lines.len() as u128)
        .checked_sub(ones + multi.total as u128)
        .ok_or_else(|| Error::Internal("recovered line counts exceed the line total".into()))?;
    let mut hist = IntersectionHistogram::new(level);
    hist.total = lines.len();
    if zeros > 0 {
        hist.counts.insert(0, zeros as u64);
    }
    if ones > 0 {
        hist.counts.insert(1, ones as u64);
    }
    hist.counts.extend(multi.counts);
    hist.contained = multi.contained;
    Ok(hist)
}

fn recount(field: &Field, forms: &[HomogPoly], line: &LinearSubspace) -> usize {
    line.points(field)
        .iter()
        .filter(|p| vanishes_on(forms, p.coords()))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projspace::ProjSpace;

    fn spec(text: &str) -> VarietySpec {
        VarietySpec::parse(text).unwrap()
    }

    fn conic(p: u64) -> VarietySpec {
        spec(&format!("p={p}\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\""))
    }

    fn nodal_cubic(p: u64) -> VarietySpec {
        spec(&format!(
            "p={p}\ne=1\nn=2\nm=1\nd=3\npoly=\"x1^2*x2 - x0^2*(x0 + x2)\""
        ))
    }

    /// Every subspace against every point of `P^n`, with no shared code
    /// beyond field arithmetic and enumeration.
    fn brute(spec: &VarietySpec, level: u32) -> IntersectionHistogram {
        let b = Budget::default();
        let field = spec.level_field(level, &b).unwrap();
        let forms = spec.polys_over(&field).unwrap();
        let space = ProjSpace::new(&field, spec.n, u64::MAX).unwrap();
        let grass = Grassmannian::new(&field, spec.n, spec.m, u64::MAX).unwrap();
        let mut h = IntersectionHistogram::new(level);
        for v in grass.iter() {
            let mut on_x = 0;
            let mut off_x = 0;
            for p in space.iter() {
                if v.contains_coords(&field, p.coords()) {
                    if forms.iter().all(|f| f.eval_coords(p.coords()).is_zero()) {
                        on_x += 1;
                    } else {
                        off_x += 1;
                    }
                }
            }
            if off_x == 0 && forms.iter().all(|f| f.compose_linear(v.basis()).unwrap().is_zero()) {
                h.record_contained();
            } else {
                h.record(on_x);
            }
        }
        h.subspace_points = grass.subspace_at(0).point_count(field.size() as u64);
        h
    }

    fn hist(q: u64, entries: &[(usize, u64)], contained: u64) -> IntersectionHistogram {
        let level = 1;
        let mut h = IntersectionHistogram::new(level);
        for &(k, c) in entries {
            h.counts.insert(k, c);
            h.total += c;
        }
        h.contained = contained;
        h.total += contained;
        h.subspace_points = q + 1;
        h
    }

    #[test]
    fn conic_histograms() {
        let b = Budget::default();
        for s in [Strategy::Auto, Strategy::Generic, Strategy::PairCount] {
            let h = exact_distribution(&conic(3), 1, s, &b).unwrap();
            assert_eq!(h, hist(3, &[(0, 3), (1, 4), (2, 6)], 0));
            let h = exact_distribution(&conic(2), 1, s, &b).unwrap();
            assert_eq!(h, hist(2, &[(0, 1), (1, 3), (2, 3)], 0));
        }
        assert_eq!(brute(&conic(3), 1), hist(3, &[(0, 3), (1, 4), (2, 6)], 0));
        let h = exact_distribution(&conic(3), 2, Strategy::Auto, &b).unwrap();
        assert_eq!(h.total, 91);
        assert_eq!(h.count(1), 10);
    }

    #[test]
    fn line_counts_itself_as_contained() {
        let b = Budget::default();
        let line = spec("p=2\ne=1\nn=2\nm=1\nd=1\npoly=\"x0\"");
        for s in [Strategy::Generic, Strategy::PairCount] {
            let h = exact_distribution(&line, 1, s, &b).unwrap();
            assert_eq!(h, hist(2, &[(1, 6)], 1));
            assert_eq!(h.set_theoretic_counts(), [(1, 6), (3, 1)].into_iter().collect());
        }
        assert_eq!(brute(&line, 1), hist(2, &[(1, 6)], 1));
    }

    #[test]
    fn strategies_agree_with_brute_force() {
        let b = Budget::default();
        for p in [2, 3] {
            for level in 1..=2 {
                for s in [conic(p), nodal_cubic(p)] {
                    let fast = exact_distribution(&s, level, Strategy::PairCount, &b).unwrap();
                    let slow = exact_distribution(&s, level, Strategy::Generic, &b).unwrap();
                    assert_eq!(fast, slow, "p={p} N={level}");
                    assert_eq!(fast, brute(&s, level), "p={p} N={level}");
                }
            }
        }
    }

    #[test]
    fn reducible_and_surface_cases() {
        let b = Budget::default();
        // two lines, each contained; a saturating pair tally on F_32 lines
        let pair = spec("p=2\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x1\"");
        let fast = exact_distribution(&pair, 5, Strategy::PairCount, &b).unwrap();
        let slow = exact_distribution(&pair, 5, Strategy::Generic, &b).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast.contained, 2);
        assert_eq!(brute(&pair, 1), exact_distribution(&pair, 1, Strategy::Auto, &b).unwrap());
        // quadric surface sliced by lines of P^3: 2(q+1) rulings contained
        let quadric = spec("p=3\ne=1\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"");
        let fast = exact_distribution(&quadric, 1, Strategy::PairCount, &b).unwrap();
        assert_eq!(fast.contained, 8);
        assert_eq!(fast, brute(&quadric, 1));
        // twisted cubic, two forms: generic only
        let twisted = spec(
            "p=3\ne=1\nn=3\nm=1\nd=3\npoly=\"x0*x2 - x1^2\"\npoly=\"x1*x3 - x2^2\"\npoly=\"x0*x3 - x1*x2\"",
        );
        assert!(exact_distribution(&twisted, 1, Strategy::PairCount, &b).is_err());
        let h = exact_distribution(&twisted, 1, Strategy::Auto, &b).unwrap();
        assert_eq!(h, brute(&twisted, 1));
        assert!(h.max_key().unwrap() <= 3);
    }

    #[test]
    fn budgets_are_enforced() {
        let b = Budget {
            max_subspaces: 10,
            ..Budget::default()
        };
        assert!(matches!(
            exact_distribution(&conic(3), 1, Strategy::Auto, &b),
            Err(Error::Budget { .. })
        ));
        let b = Budget {
            max_work: 3,
            ..Budget::default()
        };
        assert!(matches!(
            exact_distribution(&conic(3), 1, Strategy::PairCount, &b),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn pair_roots() {
        for j in 2..200u64 {
            assert_eq!(pair_root(j * (j - 1) / 2), Some(j));
        }
        assert_eq!(pair_root(2), None);
    }
}
