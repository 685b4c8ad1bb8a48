//! Exact arithmetic in finite fields `GF(p^k)`.
//!
//! Elements are stored in the polynomial basis, packed as the base-`p` integer
//! `Σ cᵢ pⁱ` of their coefficient vector (constant term least significant), so
//! `0` and `1` are always encoded as `0` and `1`. Fields with at most
//! [`TABLE_LIMIT`] elements carry exponential, logarithm and Zech tables;
//! larger fields fall back to plain polynomial arithmetic.

mod poly;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::arith;

/// Largest field this crate will construct unless told otherwise.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 24;
/// Fields up to this size get log/Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({p}^{k}) exceeds the cap of {cap} elements")]
    TooLarge { p: u64, k: u32, cap: u64 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("zero has no discrete logarithm")]
    ZeroLog,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("degree {sub} does not divide the extension degree {k}")]
    NotSubfield { sub: u32, k: u32 },
    #[error("GF({sub}) does not embed into GF({sup})")]
    NoEmbedding { sub: u64, sup: u64 },
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// A field element in packed polynomial-basis form. Only meaningful together
/// with the [`Field`] that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn from_raw(raw: u32) -> Elem {
        Elem(raw)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

struct FieldInner {
    p: u32,
    k: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: Elem,
    tables: Option<Tables>,
    baby_steps: OnceLock<HashMap<u32, u32>>,
}

/// Descriptor of `GF(p^k)`; cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.modulus.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.0.modulus.iter().map(|c| c.to_string()).collect();
        write!(f, "GF({}^{};{})", self.0.p, self.0.k, coeffs.join(","))
    }
}

impl Field {
    /// `GF(p^k)` with the smallest primitive monic modulus of degree `k`.
    ///
    /// Candidates are ordered by the packed integer of their non-leading
    /// coefficients, i.e. highest-degree coefficient compared first.
    pub fn new(p: u64, k: u32) -> Result<Field, GfError> {
        Field::with_cap(p, k, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Field, GfError> {
        if !arith::is_prime(p as u128) {
            return Err(GfError::NotPrime(p));
        }
        if k == 0 {
            return Err(GfError::ZeroDegree);
        }
        let order = (p as u128).checked_pow(k).filter(|&o| o <= cap as u128 && o < u32::MAX as u128);
        let Some(order) = order else {
            return Err(GfError::TooLarge { p, k, cap });
        };
        let p32 = p as u32;
        let order = order as u32;
        let n = (order - 1) as u128;
        let primes = arith::prime_divisors(n);
        let x: Vec<u32> = vec![0, 1];

        let mut modulus = None;
        for t in 0..(order as u64) {
            let mut f = digits_of(t as u32, p32, k as usize);
            if f[0] == 0 {
                continue;
            }
            f.push(1);
            let one = poly::rem(&[1], &f, p32);
            if poly::powmod(&x, n, &f, p32) != one {
                continue;
            }
            if primes.iter().all(|&r| poly::powmod(&x, n / r, &f, p32) != one) {
                modulus = Some(f);
                break;
            }
        }
        let modulus = modulus.expect("a primitive polynomial exists for every finite field");
        assert!(poly::is_irreducible(&modulus, p32), "primitive modulus must be irreducible");

        let gen_poly = poly::rem(&x, &modulus, p32);
        let generator = Elem(pack(&gen_poly, p32));
        let inner = FieldInner {
            p: p32,
            k,
            order,
            modulus,
            generator,
            tables: None,
            baby_steps: OnceLock::new(),
        };
        let mut field = inner;
        if order as u64 <= TABLE_LIMIT {
            field.tables = Some(build_tables(&field));
        }
        let field = Field(Arc::new(field));
        debug_assert_eq!(field.element_order(field.generator()), n as u64);
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Number of elements.
    pub fn order(&self) -> u64 {
        self.0.order as u64
    }

    /// Modulus coefficients, constant term first, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    pub fn generator(&self) -> Elem {
        self.0.generator
    }

    /// Image of the integer `n` in the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.0.order).map(Elem)
    }

    /// `generator^i`.
    pub fn exp(&self, i: i64) -> Elem {
        let n = (self.0.order - 1) as i64;
        let e = i.rem_euclid(n) as u32;
        match &self.0.tables {
            Some(t) => Elem(t.exp[e as usize]),
            None => self.pow_slow(self.generator(), e as u128),
        }
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        if self.0.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        match &self.0.tables {
            Some(t) => {
                let n = self.0.order - 1;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = (lb + n - la) % n;
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    Elem(0)
                } else {
                    Elem(t.exp[((la as u64 + z as u64) % n as u64) as usize])
                }
            }
            None => self.add_digits(a, b),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if a.0 == 0 || self.0.p == 2 {
            return a;
        }
        let p = self.0.p;
        let d: Vec<u32> = self.digits(a).iter().map(|&c| (p - c) % p).collect();
        Elem(pack(&d, p))
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem(0);
        }
        match &self.0.tables {
            Some(t) => {
                let n = self.0.order - 1;
                let s = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                Elem(t.exp[(s % n as u64) as usize])
            }
            None => self.mul_slow(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(match &self.0.tables {
            Some(t) => {
                let n = self.0.order - 1;
                let l = t.log[a.0 as usize];
                Elem(t.exp[((n - l) % n) as usize])
            }
            None => self.pow_slow(a, (self.0.order - 2) as u128),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents invert first.
    pub fn pow(&self, a: Elem, e: i128) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return match e {
                0 => Ok(Elem(1)),
                e if e > 0 => Ok(Elem(0)),
                _ => Err(GfError::ZeroInverse),
            };
        }
        let n = (self.0.order - 1) as i128;
        let e = e.rem_euclid(n) as u128;
        Ok(match &self.0.tables {
            Some(t) => {
                let l = t.log[a.0 as usize] as u128;
                Elem(t.exp[((l * e) % n as u128) as usize])
            }
            None => self.pow_slow(a, e),
        })
    }

    /// `a^e` for a nonnegative exponent.
    pub fn pow_u(&self, a: Elem, e: u128) -> Elem {
        if e == 0 {
            return Elem(1);
        }
        if a.0 == 0 {
            return Elem(0);
        }
        let n = (self.0.order - 1) as u128;
        self.pow(a, (e % n) as i128).expect("nonzero base")
    }

    /// `x^(p^j)`.
    pub fn frobenius(&self, x: Elem, j: u32) -> Elem {
        if x.0 == 0 {
            return x;
        }
        let n = (self.0.order - 1) as u128;
        let j = j % self.0.k;
        let mut e = 1u128;
        for _ in 0..j {
            e = e * self.0.p as u128 % n;
        }
        if e == 0 {
            e = n;
        }
        self.pow_u(x, e)
    }

    /// Relative trace down to `GF(p^sub_degree)`, returned as an element of this field.
    pub fn trace_rel(&self, x: Elem, sub_degree: u32) -> Result<Elem, GfError> {
        self.check_sub(sub_degree)?;
        let m = self.0.k / sub_degree;
        let mut acc = Elem(0);
        for i in 0..m {
            acc = self.add(acc, self.frobenius(x, sub_degree * i));
        }
        debug_assert_eq!(self.frobenius(acc, sub_degree), acc);
        Ok(acc)
    }

    /// Relative norm down to `GF(p^sub_degree)`.
    pub fn norm_rel(&self, x: Elem, sub_degree: u32) -> Result<Elem, GfError> {
        self.check_sub(sub_degree)?;
        let m = self.0.k / sub_degree;
        let mut acc = Elem(1);
        for i in 0..m {
            acc = self.mul(acc, self.frobenius(x, sub_degree * i));
        }
        Ok(acc)
    }

    fn check_sub(&self, sub_degree: u32) -> Result<(), GfError> {
        if sub_degree == 0 || self.0.k % sub_degree != 0 {
            return Err(GfError::NotSubfield { sub: sub_degree, k: self.0.k });
        }
        Ok(())
    }

    /// `i` with `generator^i = x`, `0 <= i < order - 1`.
    pub fn discrete_log(&self, x: Elem) -> Result<u64, GfError> {
        if x.0 == 0 {
            return Err(GfError::ZeroLog);
        }
        if let Some(t) = &self.0.tables {
            return Ok(t.log[x.0 as usize] as u64);
        }
        Ok(self.bsgs(x))
    }

    /// Sort key ordering elements by discrete log, zero first.
    pub fn log_key(&self, x: Elem) -> u64 {
        if x.0 == 0 {
            0
        } else {
            self.discrete_log(x).expect("nonzero") + 1
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, x: Elem) -> u64 {
        assert!(!x.is_zero(), "zero has no multiplicative order");
        let n = (self.0.order - 1) as u128;
        let mut ord = n;
        for (r, _) in arith::factorize(n) {
            while ord % r == 0 && self.pow_u(x, ord / r) == Elem(1) {
                ord /= r;
            }
        }
        ord as u64
    }

    /// Whether `x` lies in the subfield `GF(p^sub_degree)`.
    pub fn in_subfield(&self, x: Elem, sub_degree: u32) -> bool {
        self.frobenius(x, sub_degree) == x
    }

    /// Text form: `0`, or `z<i>` for `generator^i`.
    pub fn format_elem(&self, x: Elem) -> String {
        if x.0 == 0 {
            "0".to_string()
        } else {
            format!("z{}", self.discrete_log(x).expect("nonzero"))
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem, GfError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Elem(0));
        }
        let i: u64 = s
            .strip_prefix('z')
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| GfError::Parse(s.to_string()))?;
        if i >= self.order() - 1 {
            return Err(GfError::Parse(s.to_string()));
        }
        Ok(self.exp(i as i64))
    }

    /// Wrap an element so it can be combined with operator syntax.
    pub fn element(&self, x: Elem) -> FieldElement {
        FieldElement { field: self.clone(), value: x }
    }

    /// Coefficient vector of `x` (constant term first, length `k`).
    pub fn digits(&self, x: Elem) -> Vec<u32> {
        digits_of(x.0, self.0.p, self.0.k as usize)
    }

    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        let da = self.digits(a);
        let db = self.digits(b);
        let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
        Elem(pack(&s, p))
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p;
        let r = poly::mulmod(&self.digits(a), &self.digits(b), &self.0.modulus, p);
        Elem(pack(&r, p))
    }

    fn pow_slow(&self, a: Elem, mut e: u128) -> Elem {
        let mut result = Elem(1);
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_slow(result, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        result
    }

    fn bsgs(&self, x: Elem) -> u64 {
        let n = (self.0.order - 1) as u64;
        let m = (n as f64).sqrt().ceil() as u64;
        let baby = self.0.baby_steps.get_or_init(|| {
            let mut table = HashMap::with_capacity(m as usize);
            let mut cur = Elem(1);
            for j in 0..m {
                table.entry(cur.0).or_insert(j as u32);
                cur = self.mul_slow(cur, self.generator());
            }
            table
        });
        let giant = self.inv(self.pow_slow(self.generator(), m as u128)).expect("nonzero");
        let mut gamma = x;
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma.0) {
                return (i * m + j as u64) % n;
            }
            gamma = self.mul_slow(gamma, giant);
        }
        unreachable!("every nonzero element is a power of a primitive element")
    }
}

fn digits_of(mut v: u32, p: u32, k: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

fn build_tables(f: &FieldInner) -> Tables {
    let n = (f.order - 1) as usize;
    let p = f.p;
    let k = f.k as usize;
    let gen = digits_of(f.generator.0, p, k);
    let mut exp = vec![0u32; n];
    let mut log = vec![NO_LOG; f.order as usize];
    let mut cur: Vec<u32> = digits_of(1, p, k);
    for i in 0..n {
        let v = pack(&cur, p);
        exp[i] = v;
        log[v as usize] = i as u32;
        let mut next = poly::mulmod(&cur, &gen, &f.modulus, p);
        next.resize(k, 0);
        cur = next;
    }
    let mut zech = vec![NO_LOG; n];
    for (i, z) in zech.iter_mut().enumerate() {
        let mut d = digits_of(exp[i], p, k);
        d[0] = (d[0] + 1) % p;
        let v = pack(&d, p);
        if v != 0 {
            *z = log[v as usize];
        }
    }
    Tables { exp, log, zech }
}

/// Field element bound to its field, for call sites that want operator syntax
/// and mixed-field checking.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    fn same_field(&self, other: &FieldElement) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::MixedFields)
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.same_field(other)?;
        Ok(self.field.element(self.field.add(self.value, other.value)))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.same_field(other)?;
        Ok(self.field.element(self.field.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        Ok(self.field.element(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: i128) -> Result<FieldElement, GfError> {
        Ok(self.field.element(self.field.pow(self.value, e)?))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_elem(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_elem(self.value))
    }
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.try_add(rhs).expect("mixed-field addition")
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.try_mul(rhs).expect("mixed-field multiplication")
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.element(self.field.neg(self.value))
    }
}

/// Field homomorphism `GF(p^a) -> GF(p^b)` for `a | b`, fixed by sending the
/// small field's generator to a root of its modulus of the form
/// `G^{c·e}` with `c = (p^b - 1)/(p^a - 1)` and `e` as small as possible.
#[derive(Clone, Debug)]
pub struct Embedding {
    sub: Field,
    sup: Field,
    stride: u64,
    unit: u64,
    unit_inv: u64,
}

impl Embedding {
    pub fn new(sub: &Field, sup: &Field) -> Result<Embedding, GfError> {
        let no = || GfError::NoEmbedding { sub: sub.order(), sup: sup.order() };
        if sub.characteristic() != sup.characteristic() || sup.degree() % sub.degree() != 0 {
            return Err(no());
        }
        let n_sub = sub.order() - 1;
        let n_sup = sup.order() - 1;
        let stride = n_sup / n_sub;
        for e in 1..=n_sub.max(1) {
            if arith::gcd(e as u128, n_sub as u128) != 1 {
                continue;
            }
            let h = sup.exp((stride as u128 * e as u128 % n_sup as u128) as i64);
            let value = sub
                .modulus()
                .iter()
                .rev()
                .fold(Elem(0), |acc, &c| sup.add(sup.mul(acc, h), Elem(c)));
            if value.is_zero() {
                let unit_inv = arith::mod_inverse(e % n_sub.max(1), n_sub.max(1)).unwrap_or(0);
                return Ok(Embedding { sub: sub.clone(), sup: sup.clone(), stride, unit: e, unit_inv });
            }
        }
        Err(no())
    }

    pub fn sub(&self) -> &Field {
        &self.sub
    }

    pub fn sup(&self) -> &Field {
        &self.sup
    }

    pub fn embed(&self, x: Elem) -> Elem {
        if x.is_zero() {
            return x;
        }
        let i = self.sub.discrete_log(x).expect("nonzero") as u128;
        let n_sup = (self.sup.order() - 1) as u128;
        self.sup.exp((i * self.unit as u128 % n_sup * self.stride as u128 % n_sup) as i64)
    }

    /// Preimage of `y`, or `None` when `y` is outside the image.
    pub fn section(&self, y: Elem) -> Option<Elem> {
        if y.is_zero() {
            return Some(y);
        }
        let l = self.sup.discrete_log(y).expect("nonzero");
        if l % self.stride != 0 {
            return None;
        }
        let n_sub = (self.sub.order() - 1).max(1) as u128;
        let i = (l / self.stride) as u128 * self.unit_inv as u128 % n_sub;
        Some(self.sub.exp(i as i64))
    }
}

/// A field viewed as a vector space over a subfield, with basis
/// `1, θ, …, θ^{d-1}` for the big field's generator `θ`, and a full
/// coordinate lookup table.
#[derive(Clone)]
pub struct RelativeBasis {
    embedding: Embedding,
    basis: Vec<Elem>,
    coords: Arc<Vec<u32>>,
}

impl RelativeBasis {
    pub fn new(sub: &Field, sup: &Field) -> Result<RelativeBasis, GfError> {
        let embedding = Embedding::new(sub, sup)?;
        let dim = (sup.degree() / sub.degree()) as usize;
        let theta = sup.generator();
        let mut basis = Vec::with_capacity(dim);
        let mut cur = sup.one();
        for _ in 0..dim {
            basis.push(cur);
            cur = sup.mul(cur, theta);
        }
        let qs = sub.order() as u32;
        let mut coords = vec![u32::MAX; sup.order() as usize];
        let embedded: Vec<Elem> = sub.elements().map(|c| embedding.embed(c)).collect();
        for packed in 0..(sup.order() as u32) {
            let mut v = packed;
            let mut acc = Elem(0);
            for b in &basis {
                let c = embedded[(v % qs) as usize];
                v /= qs;
                acc = sup.add(acc, sup.mul(c, *b));
            }
            coords[acc.0 as usize] = packed;
        }
        debug_assert!(coords.iter().all(|&c| c != u32::MAX));
        Ok(RelativeBasis { embedding, basis, coords: Arc::new(coords) })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn to_coords(&self, x: Elem) -> Vec<Elem> {
        let qs = self.embedding.sub.order() as u32;
        let mut v = self.coords[x.0 as usize];
        (0..self.dim())
            .map(|_| {
                let c = Elem(v % qs);
                v /= qs;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[Elem]) -> Elem {
        let sup = &self.embedding.sup;
        c.iter()
            .zip(&self.basis)
            .fold(Elem(0), |acc, (&ci, &b)| sup.add(acc, sup.mul(self.embedding.embed(ci), b)))
    }
}
