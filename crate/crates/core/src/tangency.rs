//! Simple-tangency search: lines meeting a plane curve with one smooth
//! point of contact order two and transversally elsewhere, and plane
//! slices of surfaces carrying such a line.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gf::{embedding, Elem, Field};
use crate::linsub::{Grassmannian, LinearSubspace};
use crate::polynomial::binary::restrict_to_rows;
use crate::polynomial::{root_multiplicities, splitting_pattern, HomogPoly};
use crate::projspace::ProjPoint;
use crate::variety::VarietySpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinePattern {
    /// The line lies on the curve.
    Contained,
    /// Root multiplicities over the algebraic closure, decreasing.
    Pattern(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Field of definition of the line.
    pub field: Field,
    /// The line, in the plane of the curve.
    pub line: LinearSubspace,
    /// The point of contact order two.
    pub point: ProjPoint,
    pub pattern: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyReport {
    pub found: bool,
    pub degree: u32,
    pub witness: Option<Witness>,
    /// Plane slice of the ambient space carrying the curve, over the base
    /// field, when the search ran on a surface.
    pub slice: Option<LinearSubspace>,
    /// The witness line in ambient coordinates, when a slice was used.
    pub ambient_line: Option<LinearSubspace>,
    pub levels_searched: Vec<u32>,
    pub slices_tried: u32,
    /// Not found, and every curve point met during the scan was singular.
    pub degenerate: bool,
    pub notes: Vec<String>,
}

impl TangencyReport {
    pub fn pattern(&self) -> &[u32] {
        self.witness.as_ref().map_or(&[], |w| &w.pattern)
    }
}

fn simple_pattern(d: u32) -> Vec<u32> {
    let mut p = vec![2];
    p.resize(d as usize - 1, 1);
    p
}

fn check_curve(curve: &HomogPoly) -> Result<()> {
    if curve.n_vars() != 3 {
        return Err(Error::Invalid(format!(
            "expected a plane curve, got a form in {} variables",
            curve.n_vars()
        )));
    }
    if curve.is_zero() {
        return Err(Error::Invalid("the zero form does not define a curve".into()));
    }
    Ok(())
}

/// Splitting pattern of the curve's restriction to `line`.
pub fn line_pattern(curve: &HomogPoly, line: &LinearSubspace, max_field: u64) -> Result<LinePattern> {
    check_curve(curve)?;
    if line.ambient_dim() != 2 || line.rank() != 2 {
        return Err(Error::ContextMismatch("expected a line of P^2".into()));
    }
    let g = restrict_to_rows(curve, &line.basis()[0], &line.basis()[1])?;
    if g.is_zero() {
        return Ok(LinePattern::Contained);
    }
    Ok(LinePattern::Pattern(splitting_pattern(&g, max_field)?))
}

fn combine(field: &Field, s: Elem, t: Elem, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| field.add(field.mul(s, x), field.mul(t, y)))
        .collect()
}

struct LevelScan {
    witness: Option<Witness>,
    smooth_seen: bool,
}

fn scan_level(curve: &HomogPoly, d: u32, field: &Field, budget: &Budget) -> Result<LevelScan> {
    let lines = Grassmannian::new(field, 2, 1, budget.max_subspaces)?;
    let smooth_seen = AtomicBool::new(false);
    let target = simple_pattern(d);
    let hit = (0..lines.len()).into_par_iter().find_map_first(|i| {
        let line = lines.subspace_at(i);
        let (a, b) = (&line.basis()[0], &line.basis()[1]);
        let attempt = || -> Result<Option<Witness>> {
            let g = restrict_to_rows(curve, a, b)?;
            if g.is_zero() {
                return Ok(None);
            }
            let roots = root_multiplicities(&g, field)?;
            let mut double = None;
            let mut doubles = 0;
            for (r, mult) in &roots {
                let x = combine(field, r.coords()[0], r.coords()[1], a, b);
                let smooth = !curve.is_singular_at(&x);
                if smooth {
                    smooth_seen.store(true, Ordering::Relaxed);
                }
                if *mult > 2 {
                    return Ok(None);
                }
                if *mult == 2 {
                    doubles += 1;
                    double = smooth.then_some(x);
                }
            }
            // a unique double root is fixed by Frobenius, hence rational here
            let (1, Some(x)) = (doubles, double) else {
                return Ok(None);
            };
            let pattern = splitting_pattern(&g, budget.max_field_size)?;
            if pattern != target {
                return Ok(None);
            }
            Ok(Some(Witness {
                field: field.clone(),
                line: line.clone(),
                point: crate::projspace::normalize(field, &x)?,
                pattern,
            }))
        };
        attempt().transpose()
    });
    Ok(LevelScan {
        witness: hit.transpose()?,
        smooth_seen: smooth_seen.load(Ordering::Relaxed),
    })
}

fn not_found_note(n_max: u32) -> String {
    format!("not found up to level N_max={n_max}; this does not rule out simple tangency")
}

/// Scans all lines of `P^2(F_{q^j})`, `j = 1..=n_max`, for a simple-tangency
/// witness of the curve of degree `d`. The first witness in enumeration
/// order is returned.
pub fn curve_has_simple_tangency(
    curve: &HomogPoly,
    d: u32,
    n_max: u32,
    budget: &Budget,
) -> Result<TangencyReport> {
    check_curve(curve)?;
    if d < 2 {
        return Err(Error::Invalid(format!(
            "simple tangency needs degree at least 2, got {d}"
        )));
    }
    if curve.degree() != d {
        return Err(Error::Invalid(format!(
            "declared degree {d} differs from the form's degree {}",
            curve.degree()
        )));
    }
    let base = curve.field();
    let mut report = TangencyReport {
        found: false,
        degree: d,
        witness: None,
        slice: None,
        ambient_line: None,
        levels_searched: Vec::new(),
        slices_tried: 0,
        degenerate: false,
        notes: Vec::new(),
    };
    if base.characteristic() == 2 && d == 2 {
        report.notes.push(
            "characteristic 2: smooth conics are strange curves, all tangent lines pass through one point"
                .into(),
        );
    }
    let mut smooth_seen = false;
    for j in 1..=n_max {
        let degree = base.degree() * j;
        let size = (base.characteristic() as u128).checked_pow(degree).unwrap_or(u128::MAX);
        if size > budget.max_field_size as u128 {
            return Err(Error::budget("tangency search field", size, budget.max_field_size));
        }
        let field = Field::new(base.characteristic() as u64, degree)?;
        let lifted = curve.embed(&*embedding(base, &field)?)?;
        let scan = scan_level(&lifted, d, &field, budget)?;
        report.levels_searched.push(j);
        smooth_seen |= scan.smooth_seen;
        if let Some(w) = scan.witness {
            report.found = true;
            report.witness = Some(w);
            return Ok(report);
        }
    }
    report.degenerate = !smooth_seen;
    if report.degenerate {
        report
            .notes
            .push("every curve point met during the scan is singular".into());
    }
    report.notes.push(not_found_note(n_max));
    Ok(report)
}

/// Tries `trials` random plane slices of a hypersurface of dimension at
/// least 2 and searches each slice curve for simple tangency.
pub fn variety_has_simple_tangency(
    spec: &VarietySpec,
    trials: u32,
    n_max: u32,
    seed: u64,
    budget: &Budget,
) -> Result<TangencyReport> {
    if spec.forms.len() != 1 || spec.n != spec.m + 1 || spec.m < 2 {
        return Err(Error::Invalid(
            "slice search needs a hypersurface of dimension at least 2".into(),
        ));
    }
    let base = spec.base_field()?;
    let form = spec.base_polys()?.remove(0);
    let d = form.degree();
    if d < 2 {
        return Err(Error::Invalid(format!(
            "simple tangency needs degree at least 2, got {d}"
        )));
    }
    let planes = Grassmannian::new(&base, spec.n, spec.m - 1, u64::MAX)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TangencyReport {
        found: false,
        degree: d,
        witness: None,
        slice: None,
        ambient_line: None,
        levels_searched: Vec::new(),
        slices_tried: 0,
        degenerate: false,
        notes: Vec::new(),
    };
    let mut skipped = 0;
    for _ in 0..trials {
        let w = planes.sample(&mut rng);
        report.slices_tried += 1;
        let curve = form.compose_linear(w.basis())?;
        if curve.is_zero() {
            skipped += 1;
            continue;
        }
        let sub = curve_has_simple_tangency(&curve, d, n_max, budget)?;
        for level in sub.levels_searched {
            if !report.levels_searched.contains(&level) {
                report.levels_searched.push(level);
            }
        }
        if let Some(witness) = sub.witness {
            let emb = embedding(&base, &witness.field)?;
            let field = &witness.field;
            let rows: Vec<Vec<Elem>> = witness
                .line
                .basis()
                .iter()
                .map(|c| {
                    let mut x = vec![Elem::ZERO; spec.n + 1];
                    for (&ci, row) in c.iter().zip(w.basis()) {
                        for (xi, &r) in x.iter_mut().zip(row) {
                            *xi = field.add(*xi, field.mul(ci, emb.apply(r)));
                        }
                    }
                    x
                })
                .collect();
            report.ambient_line = Some(LinearSubspace::from_rows(field, spec.n, rows)?);
            report.found = true;
            report.witness = Some(witness);
            report.slice = Some(w);
            report.notes.extend(sub.notes);
            return Ok(report);
        }
    }
    if skipped > 0 {
        report
            .notes
            .push(format!("{skipped} sampled planes lie inside X and were skipped"));
    }
    if trials == 0 {
        report.notes.push("no slices were tried".into());
    }
    report.notes.push(not_found_note(n_max));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{parse_poly, restrict_to_line};

    fn curve(p: u64, src: &str) -> HomogPoly {
        parse_poly(src, 2, &Field::new(p, 1).unwrap()).unwrap()
    }

    fn line(field: &Field, a: &[i64], b: &[i64]) -> LinearSubspace {
        let row = |v: &[i64]| v.iter().map(|&x| field.from_int(x)).collect();
        LinearSubspace::from_rows(field, 2, vec![row(a), row(b)]).unwrap()
    }

    #[test]
    fn line_patterns() {
        let c = curve(3, "x0*x2 - x1^2");
        let f3 = c.field().clone();
        let z = line(&f3, &[1, 0, 0], &[0, 1, 0]);
        assert_eq!(line_pattern(&c, &z, 1 << 24).unwrap(), LinePattern::Pattern(vec![2]));
        let y = line(&f3, &[1, 0, 0], &[0, 0, 1]);
        assert_eq!(line_pattern(&c, &y, 1 << 24).unwrap(), LinePattern::Pattern(vec![1, 1]));
        let pair = curve(3, "x0*x1");
        let x0 = line(&f3, &[0, 1, 0], &[0, 0, 1]);
        assert_eq!(line_pattern(&pair, &x0, 1 << 24).unwrap(), LinePattern::Contained);
    }

    #[test]
    fn tangent_lines_of_conics() {
        for p in [3u64, 5] {
            let c = curve(p, "x0*x2 - x1^2");
            let field = c.field().clone();
            let tangents = Grassmannian::new(&field, 2, 1, 1000)
                .unwrap()
                .iter()
                .filter(|l| line_pattern(&c, l, 1 << 24).unwrap() == LinePattern::Pattern(vec![2]))
                .count();
            assert_eq!(tangents as u64, p + 1);
            let r = curve_has_simple_tangency(&c, 2, 2, &Budget::default()).unwrap();
            assert!(r.found);
            assert_eq!(r.pattern(), &[2]);
            assert_eq!(r.levels_searched, vec![1]);
        }
    }

    #[test]
    fn nodal_cubic_witness_reverifies() {
        let c = curve(3, "x1^2*x2 - x0^2*(x0 + x2)");
        let r = curve_has_simple_tangency(&c, 3, 2, &Budget::default()).unwrap();
        assert!(r.found);
        let w = r.witness.unwrap();
        assert_eq!(w.pattern, vec![2, 1]);
        let p0 = ProjPoint::from_normalized(w.line.basis()[0].clone());
        let p1 = ProjPoint::from_normalized(w.line.basis()[1].clone());
        let g = restrict_to_line(&c.embed(&embedding(c.field(), &w.field).unwrap()).unwrap(), &p0, &p1)
            .unwrap();
        assert_eq!(splitting_pattern(&g, 1 << 24).unwrap(), vec![2, 1]);
        assert!(!c.is_singular_at(w.point.coords()));
    }

    #[test]
    fn degenerate_and_invalid_curves() {
        let sq = curve(3, "(x0 + x1)^2");
        let r = curve_has_simple_tangency(&sq, 2, 2, &Budget::default()).unwrap();
        assert!(!r.found);
        assert!(r.degenerate);
        assert_eq!(r.levels_searched, vec![1, 2]);
        assert!(curve_has_simple_tangency(&curve(3, "x0"), 1, 1, &Budget::default()).is_err());
        let conic2 = curve(2, "x0*x2 + x1^2");
        let r = curve_has_simple_tangency(&conic2, 2, 1, &Budget::default()).unwrap();
        assert!(r.notes.iter().any(|n| n.contains("characteristic 2")));
    }

    #[test]
    fn quadric_slices() {
        let q = VarietySpec::parse("p=3\ne=1\nn=3\nm=2\nd=2\npoly=\"x0*x3 - x1*x2\"").unwrap();
        let b = Budget::default();
        let r = variety_has_simple_tangency(&q, 5, 2, 1, &b).unwrap();
        assert!(r.found);
        assert_eq!(r.pattern(), &[2]);
        let line = r.ambient_line.clone().unwrap();
        let w = r.witness.as_ref().unwrap();
        let form = q.polys_over(&w.field).unwrap().remove(0);
        let g = restrict_to_rows(&form, &line.basis()[0], &line.basis()[1]).unwrap();
        assert_eq!(splitting_pattern(&g, 1 << 24).unwrap(), vec![2]);
        assert_eq!(variety_has_simple_tangency(&q, 5, 2, 1, &b).unwrap(), r);
        let none = variety_has_simple_tangency(&q, 0, 2, 1, &b).unwrap();
        assert!(!none.found && none.slices_tried == 0);
        let conic = VarietySpec::parse("p=3\ne=1\nn=2\nm=1\nd=2\npoly=\"x0*x2 - x1^2\"").unwrap();
        assert!(variety_has_simple_tangency(&conic, 1, 1, 0, &b).is_err());
    }
}
