//! Finite fields `F_p` and `F_{p^k}`.
//!
//! An element of `F_{p^k}` is stored as a single `u32` index: the integer
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` built from its coordinates in the
//! power basis of the modulus. Index order is the element enumeration order,
//! so `0` comes first and `1` second.
//!
//! Fields up to [`TABLE_LIMIT`] elements multiply through exp/log tables;
//! larger ones fall back to schoolbook multiplication modulo the modulus.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

/// Fields at most this large get multiplication tables.
pub const TABLE_LIMIT: u32 = 1 << 20;

/// An element of some [`Field`], identified by its index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    /// Element with the given index; callers guarantee it is in range.
    #[inline]
    pub(crate) fn from_raw(index: u32) -> Elem {
        Elem(index)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

struct Tables {
    log: Vec<u32>,
    // exp has length 2(q-1) so log a + log b never needs a reduction.
    exp: Vec<u32>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A finite field context. Cheap to clone; contexts for the same `(p, k)`
/// share one allocation.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Polynomials over `F_p` as coefficient vectors, constant term first.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c as u64 * bi as u64 % p as u64) as u32;
                let slot = &mut r[shift + i];
                *slot = (*slot + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
        let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        acc as u32
    }

    /// Irreducibility by trial division with every monic polynomial of
    /// degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for dd in 1..=deg / 2 {
            let count = (p as u64).pow(dd as u32);
            for low in 0..count {
                let mut g = Vec::with_capacity(dd + 1);
                let mut x = low;
                for _ in 0..dd {
                    g.push((x % p as u64) as u32);
                    x /= p as u64;
                }
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Field {
    /// Field with `p^k` elements whose modulus is the smallest monic
    /// irreducible polynomial of degree `k` in index order (lower
    /// coefficients read as a base-`p` number, constant term least
    /// significant). For `k = 1` the modulus is the placeholder `x`.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let size = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if size > MAX_FIELD_SIZE as u128 {
            return Err(Error::FieldTooLarge { size, cap: MAX_FIELD_SIZE });
        }
        let key = (p as u32, k);
        if let Some(f) = field_cache().lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let field = Field::build(p as u32, k, size as u32);
        let mut cache = field_cache().lock().unwrap();
        Ok(cache.entry(key).or_insert(field).clone())
    }

    fn build(p: u32, k: u32, q: u32) -> Field {
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            let lows = (p as u64).pow(k);
            (0..lows)
                .map(|low| {
                    let mut m = Vec::with_capacity(k as usize + 1);
                    let mut x = low;
                    for _ in 0..k {
                        m.push((x % p as u64) as u32);
                        x /= p as u64;
                    }
                    m.push(1);
                    m
                })
                .find(|m| m[0] != 0 && fp_poly::is_irreducible(m, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT && q > 2 {
            inner.tables = Some(build_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn size(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first, monic of length `k + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Whether `self` contains a copy of `sub`, i.e. same characteristic and
    /// `sub.degree()` divides `self.degree()`.
    pub fn extends(&self, sub: &Field) -> bool {
        self.0.p == sub.0.p && self.0.k.is_multiple_of(sub.0.k)
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn elem(&self, index: u32) -> Result<Elem> {
        self.check(Elem(index))
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if a.0 < self.0.q {
            Ok(a)
        } else {
            Err(Error::ContextMismatch(format!(
                "element index {} outside {:?}",
                a.0, self
            )))
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() != self.0.k as usize {
            return Err(Error::ContextMismatch(format!(
                "expected {} coefficients, got {}",
                self.0.k,
                coeffs.len()
            )));
        }
        let mut idx = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.0.p {
                return Err(Error::ContextMismatch(format!(
                    "coefficient {c} not reduced mod {}",
                    self.0.p
                )));
            }
            idx = idx * self.0.p + c;
        }
        Ok(Elem(idx))
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.0.p;
        let mut x = a.0;
        (0..self.0.k)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Send {
        (0..self.0.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y, mut pw, mut r) = (a.0, b.0, 1u32, 0u32);
        while x > 0 || y > 0 {
            let d = x % p + y % p;
            r += if d >= p { d - p } else { d } * pw;
            x /= p;
            y /= p;
            pw = pw.wrapping_mul(p);
        }
        Elem(r)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.0.p;
        if self.0.k == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return a;
        }
        let (mut x, mut pw, mut r) = (a.0, 1u32, 0u32);
        while x > 0 {
            let d = x % p;
            r += if d == 0 { 0 } else { p - d } * pw;
            x /= p;
            pw = pw.wrapping_mul(p);
        }
        Elem(r)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.0.k == 1 {
            return Elem((a.0 as u64 * b.0 as u64 % self.0.p as u64) as u32);
        }
        match &self.0.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => Elem(slow_mul(&self.0, a.0, b.0)),
        }
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, Elem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let q = self.0.q;
        if let Some(t) = &self.0.tables {
            let l = t.log[a.0 as usize];
            return Ok(Elem(t.exp[((q - 1 - l) % (q - 1)) as usize]));
        }
        Ok(self.pow(a, q as u64 - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked binary operation on raw inputs.
    pub fn arith(&self, a: Elem, b: Elem, op: ArithOp) -> Result<Elem> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
        })
    }

    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.0.p as u64)
    }

    /// `c` for prime fields, `[c0,c1,...]` otherwise.
    pub fn format_elem(&self, a: Elem) -> String {
        if self.0.k == 1 {
            return a.0.to_string();
        }
        let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn slow_mul(f: &Inner, a: u32, b: u32) -> u32 {
    let (p, k) = (f.p as u64, f.k as usize);
    let digits = |mut x: u32| {
        let mut v = vec![0u64; k];
        for d in v.iter_mut() {
            *d = (x % f.p) as u64;
            x /= f.p;
        }
        v
    };
    let (da, db) = (digits(a), digits(b));
    let mut prod = vec![0u64; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // x^k = -(m_0 + ... + m_{k-1} x^{k-1})
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        prod[top] = 0;
        for (i, &m) in f.modulus[..k].iter().enumerate() {
            let slot = &mut prod[top - k + i];
            *slot = (*slot + c * (p - m as u64)) % p;
        }
    }
    prod[..k].iter().rev().fold(0u32, |acc, &c| acc * f.p + c as u32)
}

fn build_tables(f: &Inner) -> Tables {
    let q = f.q;
    let order = (q - 1) as u64;
    let factors = prime_factors(order);
    let slow_pow = |a: u32, mut e: u64| {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(f, acc, base);
            }
            base = slow_mul(f, base, base);
            e >>= 1;
        }
        acc
    };
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; 2 * (q as usize - 1)];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..(q - 1) as usize {
        exp[i] = x;
        exp[i + q as usize - 1] = x;
        log[x as usize] = i as u32;
        x = slow_mul(f, x, generator);
    }
    Tables { log, exp }
}

/// Ring embedding `F_{p^e} -> F_{p^{eN}}` sending the generator of the
/// source to the smallest root of the source modulus in the target.
pub struct Embedding {
    src: Field,
    dst: Field,
    root: Elem,
    powers: Vec<Elem>,
    table: Option<Vec<Elem>>,
}

const EMBED_TABLE_LIMIT: u32 = 1 << 16;

impl Embedding {
    pub fn new(src: &Field, dst: &Field) -> Result<Embedding> {
        if !dst.extends(src) {
            return Err(Error::ContextMismatch(format!(
                "{src:?} is not a subfield of {dst:?}"
            )));
        }
        let root = if src.is_prime_field() {
            Elem::ZERO
        } else {
            let m = src.modulus();
            dst.elements()
                .find(|&r| {
                    let v = m.iter().rev().fold(Elem::ZERO, |acc, &c| {
                        dst.add(dst.mul(acc, r), dst.from_int(c as i64))
                    });
                    v.is_zero()
                })
                .ok_or_else(|| {
                    Error::Internal(format!("modulus of {src:?} has no root in {dst:?}"))
                })?
        };
        let mut powers = Vec::with_capacity(src.degree() as usize);
        let mut x = Elem::ONE;
        for _ in 0..src.degree() {
            powers.push(x);
            x = dst.mul(x, root);
        }
        let mut emb = Embedding {
            src: src.clone(),
            dst: dst.clone(),
            root,
            powers,
            table: None,
        };
        if src.size() <= EMBED_TABLE_LIMIT {
            let table = src.elements().map(|a| emb.compute(a)).collect();
            emb.table = Some(table);
        }
        Ok(emb)
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.dst
    }

    /// Image of the source generator.
    pub fn root(&self) -> Elem {
        self.root
    }

    fn compute(&self, a: Elem) -> Elem {
        let coeffs = self.src.coeffs(a);
        coeffs
            .iter()
            .zip(&self.powers)
            .fold(Elem::ZERO, |acc, (&c, &pw)| {
                self.dst.add(acc, self.dst.mul(self.dst.from_int(c as i64), pw))
            })
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        match &self.table {
            Some(t) => t[a.0 as usize],
            None => self.compute(a),
        }
    }
}

type EmbeddingCache = Mutex<HashMap<(u32, u32, u32), Arc<Embedding>>>;

fn embedding_cache() -> &'static EmbeddingCache {
    static CACHE: OnceLock<EmbeddingCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached embedding for the pair `(src, dst)`.
pub fn embedding(src: &Field, dst: &Field) -> Result<Arc<Embedding>> {
    let key = (src.characteristic(), src.degree(), dst.degree());
    if let Some(e) = embedding_cache().lock().unwrap().get(&key) {
        if e.src == *src && e.dst == *dst {
            return Ok(e.clone());
        }
    }
    let emb = Arc::new(Embedding::new(src, dst)?);
    embedding_cache()
        .lock()
        .unwrap()
        .insert(key, emb.clone());
    Ok(emb)
}

pub fn embed(src: &Field, dst: &Field, a: Elem) -> Result<Elem> {
    let a = src.check(a)?;
    Ok(embedding(src, dst)?.apply(a))
}
