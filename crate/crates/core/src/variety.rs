//! Varieties given by homogeneous forms over `F_q`, their rational points
//! over `F_{q^N}`, and desk-scale sanity checks.

use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gf::{embedding, Elem, Field};
use crate::linsub::{Grassmannian, LinearSubspace};
use crate::polynomial::{linear_factor_search, parse_poly, HomogPoly};
use crate::projspace::{ProjPoint, ProjSpace};
use crate::stats::{exact_distribution, Rational, Strategy};

/// Contents of a variety spec file.
///
/// ```text
/// # smooth conic over F_3
/// p=3
/// e=1
/// n=2
/// m=1
/// d=2
/// poly="x0*x2 - x1^2"
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VarietySpec {
    pub p: u64,
    pub e: u32,
    pub n: usize,
    /// Declared dimension of X, also the codimension of the slicing subspaces.
    pub m: usize,
    /// Declared degree.
    pub d: u32,
    pub forms: Vec<String>,
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

impl VarietySpec {
    pub fn parse(text: &str) -> Result<VarietySpec> {
        let (mut p, mut e, mut n, mut m, mut d) = (None, None, None, None, None);
        let mut forms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Invalid(format!("spec line {}: {msg}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|_| bad("expected a nonnegative integer"));
            match key {
                "p" => p = Some(int(value)?),
                "e" => e = Some(int(value)? as u32),
                "n" => n = Some(int(value)? as usize),
                "m" => m = Some(int(value)? as usize),
                "d" => d = Some(int(value)? as u32),
                "poly" => {
                    let inner = value
                        .strip_prefix('"')
                        .and_then(|v| v.strip_suffix('"'))
                        .ok_or_else(|| bad("poly value must be double-quoted"))?;
                    forms.push(inner.to_string());
                }
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::Invalid(format!("spec is missing `{k}`"));
        let spec = VarietySpec {
            p: p.ok_or_else(|| missing("p"))?,
            e: e.ok_or_else(|| missing("e"))?,
            n: n.ok_or_else(|| missing("n"))?,
            m: m.ok_or_else(|| missing("m"))?,
            d: d.ok_or_else(|| missing("d"))?,
            forms,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<VarietySpec> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|err| {
            Error::Invalid(format!("cannot read spec file {}: {err}", path.display()))
        })?;
        VarietySpec::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "p={}\ne={}\nn={}\nm={}\nd={}\n",
            self.p, self.e, self.n, self.m, self.d
        );
        for f in &self.forms {
            out.push_str(&format!("poly=\"{f}\"\n"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.m > self.n {
            return Err(Error::Invalid(format!(
                "dimension m={} must satisfy 1 <= m <= n={}",
                self.m, self.n
            )));
        }
        if self.d < 1 {
            return Err(Error::Invalid("degree d must be at least 1".into()));
        }
        if self.forms.is_empty() {
            return Err(Error::Invalid("at least one poly line is required".into()));
        }
        if self.e < 1 {
            return Err(Error::Invalid("e must be at least 1".into()));
        }
        self.base_polys().map(|_| ())
    }

    pub fn base_field(&self) -> Result<Field> {
        Field::new(self.p, self.e)
    }

    /// `F_{q^N}` built directly over the prime field.
    pub fn level_field(&self, level: u32, budget: &Budget) -> Result<Field> {
        if level < 1 {
            return Err(Error::Invalid("extension level N must be at least 1".into()));
        }
        let degree = self.e.checked_mul(level).ok_or_else(|| {
            Error::budget("field size", u128::MAX, budget.max_field_size)
        })?;
        let size = (self.p as u128).checked_pow(degree).unwrap_or(u128::MAX);
        if size > budget.max_field_size as u128 {
            return Err(Error::budget("field size", size, budget.max_field_size));
        }
        Field::new(self.p, degree)
    }

    pub fn base_polys(&self) -> Result<Vec<HomogPoly>> {
        let base = self.base_field()?;
        self.forms.iter().map(|s| parse_poly(s, self.n, &base)).collect()
    }

    /// Defining forms with coefficients lifted to `field`.
    pub fn polys_over(&self, field: &Field) -> Result<Vec<HomogPoly>> {
        let base = self.base_field()?;
        let emb = embedding(&base, field)?;
        self.base_polys()?.iter().map(|f| f.embed(&emb)).collect()
    }

    pub fn is_hypersurface(&self) -> bool {
        self.forms.len() == 1 && self.m + 1 == self.n
    }

    /// `q^N` as an exact integer.
    pub fn field_size(&self, level: u32) -> BigInt {
        BigInt::from(self.p).pow(self.e * level)
    }
}

/// Rational points of X over one extension level.
#[derive(Clone, Debug)]
pub struct PointSet {
    field: Field,
    n: usize,
    level: u32,
    points: Vec<ProjPoint>,
}

impl PointSet {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

const POINT_CHUNK: u64 = 1 << 12;

pub(crate) fn vanishes_on(forms: &[HomogPoly], x: &[Elem]) -> bool {
    forms.iter().all(|f| f.eval_coords(x).is_zero())
}

/// All points of `Z(forms)` over `F_{q^N}`, by scanning `P^n(F_{q^N})`.
pub fn points_over(spec: &VarietySpec, level: u32, budget: &Budget) -> Result<PointSet> {
    let field = spec.level_field(level, budget)?;
    let forms = spec.polys_over(&field)?;
    let space = ProjSpace::new(&field, spec.n, budget.max_points)?;
    let chunks = space.len().div_ceil(POINT_CHUNK);
    let points: Vec<ProjPoint> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = c * POINT_CHUNK;
            let end = (start + POINT_CHUNK).min(space.len());
            let forms = &forms;
            let space = &space;
            (start..end)
                .map(move |i| space.point_at(i))
                .filter(move |pt| vanishes_on(forms, pt.coords()))
        })
        .collect();
    Ok(PointSet {
        field,
        n: spec.n,
        level,
        points,
    })
}

/// Number of points of `pts` lying in `v`.
pub fn intersection_count(pts: &PointSet, v: &LinearSubspace) -> Result<usize> {
    if v.ambient_dim() != pts.n {
        return Err(Error::ContextMismatch(format!(
            "subspace of P^{} against points of P^{}",
            v.ambient_dim(),
            pts.n
        )));
    }
    Ok(pts
        .points
        .iter()
        .filter(|p| v.contains_coords(&pts.field, p.coords()))
        .count())
}

/// Whether every form restricts to zero on `v`.
pub(crate) fn subspace_inside(forms: &[HomogPoly], v: &LinearSubspace) -> Result<bool> {
    for f in forms {
        if !f.compose_linear(v.basis())?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeLevel {
    #[serde(rename = "N")]
    pub level: u32,
    pub max_count: usize,
    pub contained: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub declared_degree: u32,
    pub levels: Vec<DegreeLevel>,
    pub warnings: Vec<String>,
}

/// Compares the declared degree with the largest finite intersection count
/// seen over the probed levels. Only ever warns.
pub fn degree_sanity(spec: &VarietySpec, levels: &[u32], budget: &Budget) -> Result<DegreeReport> {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for &level in levels {
        let hist = exact_distribution(spec, level, Strategy::Auto, budget)?;
        let max_count = hist
            .counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&k, _)| k)
            .max()
            .unwrap_or(0);
        if max_count > spec.d as usize {
            warnings.push(format!(
                "N={level}: a subspace meets X in {max_count} points, more than the declared degree {}",
                spec.d
            ));
        }
        out.push(DegreeLevel {
            level,
            max_count,
            contained: hist.contained,
        });
    }
    if !out.iter().any(|l| l.max_count == spec.d as usize) {
        warnings.push(format!(
            "no probed level has a subspace meeting X in exactly d={} points",
            spec.d
        ));
    }
    if spec.forms.len() == 1 {
        let deg = spec.base_polys()?[0].degree();
        if deg != spec.d {
            warnings.push(format!(
                "declared degree {} differs from the form's degree {deg}",
                spec.d
            ));
        }
    }
    Ok(DegreeReport {
        declared_degree: spec.d,
        levels: out,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct DensityReport {
    pub level: u32,
    pub irreducible: u64,
    pub total: u64,
    pub mu: Rational,
}

/// Fraction of planes of `P^3(F_{q^N})` whose section of the surface is
/// absolutely irreducible.
pub fn slice_irreducibility_density(
    spec: &VarietySpec,
    level: u32,
    budget: &Budget,
) -> Result<DensityReport> {
    if spec.n != 3 || spec.forms.len() != 1 {
        return Err(Error::Invalid(
            "slice density needs a surface in P^3 given by one form".into(),
        ));
    }
    let field = spec.level_field(level, budget)?;
    let form = spec.polys_over(&field)?.remove(0);
    let d = form.degree();
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDegree(d));
    }
    let planes = Grassmannian::new(&field, 3, 1, budget.max_subspaces)?;
    let verdicts: Vec<Result<bool>> = (0..planes.len())
        .into_par_iter()
        .map(|i| {
            let plane = planes.subspace_at(i);
            let section = form.compose_linear(plane.basis())?;
            if section.is_zero() {
                return Ok(false);
            }
            if d == 1 {
                return Ok(true);
            }
            Ok(linear_factor_search(&section, budget.max_field_size)?.is_irreducible())
        })
        .collect();
    let mut irreducible = 0u64;
    for v in verdicts {
        if v? {
            irreducible += 1;
        }
    }
    Ok(DensityReport {
        level,
        irreducible,
        total: planes.len(),
        mu: Rational::new(irreducible.into(), planes.len().into()),
    })
}
