use super::HomogPoly;
use crate::error::{Error, Result};
use crate::gf::{embedding, Elem, Field, MAX_FIELD_SIZE};
use crate::projspace::ProjPoint;

/// `c_0 s^d + c_1 s^{d-1} t + ... + c_d t^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    field: Field,
    coeffs: Vec<Elem>,
}

impl BinaryForm {
    pub fn new(field: &Field, coeffs: Vec<Elem>) -> Result<BinaryForm> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("a binary form needs at least one coefficient".into()));
        }
        for &c in &coeffs {
            field.check(c)?;
        }
        Ok(BinaryForm {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, s: Elem, t: Elem) -> Elem {
        let f = &self.field;
        let d = self.coeffs.len() - 1;
        self.coeffs.iter().enumerate().fold(Elem::ZERO, |acc, (i, &c)| {
            let m = f.mul(f.mul(c, f.pow(s, (d - i) as u64)), f.pow(t, i as u64));
            f.add(acc, m)
        })
    }

    /// Same form over an extension of its field.
    pub fn lift(&self, ext: &Field) -> Result<BinaryForm> {
        if ext == &self.field {
            return Ok(self.clone());
        }
        let emb = embedding(&self.field, ext)?;
        Ok(BinaryForm {
            field: ext.clone(),
            coeffs: self.coeffs.iter().map(|&c| emb.apply(c)).collect(),
        })
    }
}

/// `g(s, t) = f(s P0 + t P1)`; identically zero iff the line lies on `Z(f)`.
pub fn restrict_to_line(f: &HomogPoly, p0: &ProjPoint, p1: &ProjPoint) -> Result<BinaryForm> {
    if p0 == p1 {
        return Err(Error::Invalid("restriction needs two distinct points".into()));
    }
    restrict_to_rows(f, p0.coords(), p1.coords())
}

pub(crate) fn restrict_to_rows(f: &HomogPoly, a: &[Elem], b: &[Elem]) -> Result<BinaryForm> {
    let g = f.compose_linear(&[a.to_vec(), b.to_vec()])?;
    let d = f.degree() as usize;
    let mut coeffs = vec![Elem::ZERO; d + 1];
    for (e, c) in g.terms() {
        coeffs[e[1] as usize] = c;
    }
    Ok(BinaryForm {
        field: f.field().clone(),
        coeffs,
    })
}

/// Synthetic division of `h` (constant term first) by `(t - u)`; returns
/// the quotient if the remainder vanishes.
fn divide_root(field: &Field, h: &[Elem], u: Elem) -> Option<Vec<Elem>> {
    let deg = h.len() - 1;
    let mut q = vec![Elem::ZERO; deg];
    let mut carry = Elem::ZERO;
    for i in (0..=deg).rev() {
        let v = field.add(h[i], field.mul(carry, u));
        if i == 0 {
            return v.is_zero().then_some(q);
        }
        q[i - 1] = v;
        carry = v;
    }
    unreachable!()
}

/// Projective roots of `g` over `ext` with their multiplicities, in
/// enumeration order of `P^1(ext)`: `(1:u)` for increasing `u`, then `(0:1)`.
pub fn root_multiplicities(g: &BinaryForm, ext: &Field) -> Result<Vec<(ProjPoint, u32)>> {
    if g.is_zero() {
        return Err(Error::Invalid("the zero form has every point as a root".into()));
    }
    let g = g.lift(ext)?;
    let d = g.degree();
    // h(t) = g(1, t) = sum c_i t^i; roots (1:u) are roots of h and the root
    // (0:1) has multiplicity d - deg h.
    let mut h = g.coeffs.clone();
    while h.last().is_some_and(|c| c.is_zero()) {
        h.pop();
    }
    let at_infinity = d - (h.len() as u32 - 1);
    let mut out = Vec::new();
    let mut found = 0;
    let target = h.len() as u32 - 1;
    if target > 0 {
        for u in ext.elements() {
            let mut mult = 0;
            while h.len() > 1 {
                match divide_root(ext, &h, u) {
                    Some(q) => {
                        h = q;
                        mult += 1;
                    }
                    None => break,
                }
            }
            if mult > 0 {
                out.push((ProjPoint::from_normalized(vec![Elem::ONE, u]), mult));
                found += mult;
                if found == target || h.len() == 1 {
                    break;
                }
            }
        }
    }
    if at_infinity > 0 {
        out.push((ProjPoint::from_normalized(vec![Elem::ZERO, Elem::ONE]), at_infinity));
    }
    Ok(out)
}

fn lcm_upto(d: u32) -> u32 {
    (1..=d).fold(1u32, |acc, x| acc / gcd(acc, x) * x)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicities of the roots of `g` over the algebraic closure, sorted in
/// decreasing order. Works in the extension of degree `lcm(1..=d)` over the
/// form's field, which contains every root; fails if that field exceeds
/// `max_field`.
pub fn splitting_pattern(g: &BinaryForm, max_field: u64) -> Result<Vec<u32>> {
    if g.is_zero() {
        return Err(Error::Invalid("the zero form has no splitting pattern".into()));
    }
    let d = g.degree();
    let base = g.field();
    let ext_degree = base.degree() * lcm_upto(d.max(1));
    let size = (base.characteristic() as u128).checked_pow(ext_degree).unwrap_or(u128::MAX);
    let cap = max_field.min(MAX_FIELD_SIZE);
    if size > cap as u128 {
        return Err(Error::budget("splitting field size", size, cap));
    }
    let ext = Field::new(base.characteristic() as u64, ext_degree)?;
    let mut pattern: Vec<u32> = root_multiplicities(g, &ext)?
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    pattern.sort_unstable_by(|a, b| b.cmp(a));
    let total: u32 = pattern.iter().sum();
    if total != d {
        return Err(Error::Internal(format!(
            "roots over the splitting field account for {total} of degree {d}"
        )));
    }
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_poly;
    use crate::projspace::normalize;

    fn f(p: u64, k: u32) -> Field {
        Field::new(p, k).unwrap()
    }

    fn pt(field: &Field, c: &[i64]) -> ProjPoint {
        let v: Vec<Elem> = c.iter().map(|&x| field.from_int(x)).collect();
        normalize(field, &v).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let f3 = f(3, 1);
        let conic = parse_poly("x0*x2 - x1^2", 2, &f3).unwrap();
        let g = restrict_to_line(&conic, &pt(&f3, &[1, 0, 0]), &pt(&f3, &[0, 0, 1])).unwrap();
        assert_eq!(g.coeffs(), &[Elem::ZERO, Elem::ONE, Elem::ZERO]);
        let g = restrict_to_line(&conic, &pt(&f3, &[1, 0, 0]), &pt(&f3, &[0, 1, 0])).unwrap();
        assert_eq!(g.coeffs(), &[Elem::ZERO, Elem::ZERO, f3.from_int(-1)]);
        let p = pt(&f3, &[1, 2, 0]);
        assert!(restrict_to_line(&conic, &p, &p).is_err());

        let lin = parse_poly("x0", 2, &f3).unwrap();
        let g = restrict_to_line(&lin, &pt(&f3, &[1, 1, 0]), &pt(&f3, &[0, 1, 1])).unwrap();
        assert_eq!(g.degree(), 1);
        assert_eq!(root_multiplicities(&g, &f3).unwrap().len(), 1);
    }

    #[test]
    fn multiplicity_examples() {
        let f3 = f(3, 1);
        let st = BinaryForm::new(&f3, vec![Elem::ZERO, Elem::ONE, Elem::ZERO]).unwrap();
        let roots = root_multiplicities(&st, &f3).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&(pt(&f3, &[0, 1]), 1)));
        assert!(roots.contains(&(pt(&f3, &[1, 0]), 1)));

        let t2 = BinaryForm::new(&f3, vec![Elem::ZERO, Elem::ZERO, Elem::ONE]).unwrap();
        assert_eq!(root_multiplicities(&t2, &f3).unwrap(), vec![(pt(&f3, &[1, 0]), 2)]);

        let s2t2 = BinaryForm::new(&f3, vec![Elem::ONE, Elem::ZERO, Elem::ONE]).unwrap();
        assert!(root_multiplicities(&s2t2, &f3).unwrap().is_empty());
        let f9 = f(3, 2);
        let over9 = root_multiplicities(&s2t2, &f9).unwrap();
        assert_eq!(over9.len(), 2);
        assert!(over9.iter().all(|&(_, m)| m == 1));
        // exhaustive oracle: the roots are exactly the u with 1 + u^2 = 0
        let expected: Vec<Elem> = f9
            .elements()
            .filter(|&u| f9.add(Elem::ONE, f9.mul(u, u)).is_zero())
            .collect();
        let got: Vec<Elem> = over9.iter().map(|(p, _)| p.coords()[1]).collect();
        assert_eq!(got, expected);

        let zero = BinaryForm::new(&f3, vec![Elem::ZERO; 3]).unwrap();
        assert!(root_multiplicities(&zero, &f3).is_err());
    }

    #[test]
    fn splitting_examples() {
        let f3 = f(3, 1);
        let st = BinaryForm::new(&f3, vec![Elem::ZERO, Elem::ONE, Elem::ZERO]).unwrap();
        assert_eq!(splitting_pattern(&st, 1 << 24).unwrap(), vec![1, 1]);
        let s2t2 = BinaryForm::new(&f3, vec![Elem::ONE, Elem::ZERO, Elem::ONE]).unwrap();
        assert_eq!(splitting_pattern(&s2t2, 1 << 24).unwrap(), vec![1, 1]);
        // t^2 s over F_2: coefficients of s^3, s^2 t, s t^2, t^3
        let f2 = f(2, 1);
        let t2s = BinaryForm::new(&f2, vec![Elem::ZERO, Elem::ZERO, Elem::ONE, Elem::ZERO]).unwrap();
        assert_eq!(splitting_pattern(&t2s, 1 << 24).unwrap(), vec![2, 1]);
        // irreducible cubic over F_2 splits into three simple roots in F_8
        let cubic = BinaryForm::new(&f2, vec![Elem::ONE, Elem::ONE, Elem::ZERO, Elem::ONE]).unwrap();
        assert_eq!(splitting_pattern(&cubic, 1 << 24).unwrap(), vec![1, 1, 1]);
        assert!(matches!(
            splitting_pattern(&cubic, 16),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn double_root_in_characteristic_two() {
        // (s + t)^2 = s^2 + t^2 has zero derivative in char 2, still mult 2
        let f2 = f(2, 1);
        let sq = BinaryForm::new(&f2, vec![Elem::ONE, Elem::ZERO, Elem::ONE]).unwrap();
        assert_eq!(root_multiplicities(&sq, &f2).unwrap(), vec![(pt(&f2, &[1, 1]), 2)]);
    }
}
