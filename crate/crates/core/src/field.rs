//! Exact arithmetic in F_p and F_{p^k}.
//!
//! An extension field is F_p[t]/(m(t)) where `m` is the lexicographically
//! smallest monic irreducible polynomial of degree `k` (coefficients compared
//! constant term first). Elements are stored as residue vectors in the power
//! basis 1, t, ..., t^{k-1}, always reduced into `[0, p)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

/// Largest characteristic accepted; keeps residue products inside `u64`.
pub const MAX_PRIME: u64 = (1 << 32) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported maximum {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("modulus is not monic irreducible of the stated degree")]
    NotIrreducible,
    #[error("division by zero")]
    DivideByZero,
    #[error("operands live in different fields: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("no embedding of {small} into {big}")]
    NoEmbedding { small: String, big: String },
    #[error("expected at most {expected} coefficients, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("field of order {0} is too large to enumerate")]
    TooLarge(BigUint),
}

struct FieldInner {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
    order: BigUint,
}

/// Description of F_{p^k}. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct FieldDesc(Arc<FieldInner>);

impl FieldDesc {
    /// Builds a field from an explicit monic modulus (constant term first).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        check_prime(p)?;
        let k = modulus.len().checked_sub(1).ok_or(FieldError::DegreeZero)?;
        if k == 0 {
            return Err(FieldError::DegreeZero);
        }
        if modulus[k] != 1 || modulus.iter().any(|&c| c >= p) || !is_irreducible(&modulus, p) {
            return Err(FieldError::NotIrreducible);
        }
        Ok(Self::new_unchecked(p, modulus))
    }

    fn new_unchecked(p: u64, modulus: Vec<u64>) -> Self {
        let k = modulus.len() - 1;
        let order = BigUint::from(p).pow(k as u32);
        FieldDesc(Arc::new(FieldInner { p, k, modulus, order }))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> usize {
        self.0.k
    }

    /// Monic modulus, constant term first, length `k + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// The cardinality q = p^k.
    pub fn order(&self) -> &BigUint {
        &self.0.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.0.order.to_u64()
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), coeffs: vec![0; self.k()] }
    }

    pub fn one(&self) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = 1 % self.p();
        e
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = v.rem_euclid(self.p() as i64) as u64;
        e
    }

    /// The class of t, the root of the modulus. Equals a constant when k = 1.
    pub fn generator(&self) -> FieldElement {
        if self.k() == 1 {
            // t ≡ -m_0 mod m(t) = t + m_0
            return self.from_int(-(self.modulus()[0] as i64));
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    /// Element with the given power-basis coefficients; entries are reduced
    /// mod p and missing high coefficients are zero.
    pub fn element(&self, coeffs: &[i64]) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.k() {
            return Err(FieldError::BadLength { expected: self.k(), got: coeffs.len() });
        }
        let p = self.p() as i64;
        let mut e = self.zero();
        for (dst, &c) in e.coeffs.iter_mut().zip(coeffs) {
            *dst = c.rem_euclid(p) as u64;
        }
        Ok(e)
    }

    /// Element number `index` in enumeration order: index = Σ c_i p^i.
    pub fn element_at(&self, mut index: u64) -> FieldElement {
        let p = self.p();
        let mut e = self.zero();
        for c in e.coeffs.iter_mut() {
            *c = index % p;
            index /= p;
        }
        e
    }

    /// All q elements in enumeration order, starting 0, 1, ...
    pub fn elements(&self) -> Result<impl Iterator<Item = FieldElement> + '_, FieldError> {
        let q = self.order_u64().ok_or_else(|| FieldError::TooLarge(self.order().clone()))?;
        Ok((0..q).map(move |i| self.element_at(i)))
    }

    fn ensure_same(&self, other: &FieldDesc) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldDesc {}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k() == 1 {
            write!(f, "GF({})", self.p())
        } else {
            write!(f, "GF({}^{})", self.p(), self.k())
        }
    }
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {:?}", self, self.modulus())
    }
}

/// Builds F_{p^k} with the lexicographically smallest monic irreducible modulus.
pub fn make_field(p: u64, k: usize) -> Result<FieldDesc, FieldError> {
    check_prime(p)?;
    if k == 0 {
        return Err(FieldError::DegreeZero);
    }
    // Candidate c_0 + c_1 x + ... + x^k, ordered with c_0 most significant.
    let mut tail = vec![0u64; k];
    loop {
        let mut modulus = tail.clone();
        modulus.push(1);
        if is_irreducible(&modulus, p) {
            return Ok(FieldDesc::new_unchecked(p, modulus));
        }
        // increment, least significant digit is c_{k-1}
        let mut i = k;
        loop {
            // an irreducible of every degree exists, so this never wraps
            i -= 1;
            tail[i] += 1;
            if tail[i] < p {
                break;
            }
            tail[i] = 0;
        }
    }
}

fn check_prime(p: u64) -> Result<(), FieldError> {
    if p > MAX_PRIME {
        return Err(FieldError::PrimeTooLarge(p));
    }
    if p < 2 {
        return Err(FieldError::NotPrime(p));
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return Err(FieldError::NotPrime(p));
        }
        d += 1;
    }
    Ok(())
}

/// An element of a [`FieldDesc`].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: FieldDesc,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    /// Power-basis coefficients, each in `[0, p)`.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Position in enumeration order, if it fits in a `u64`.
    pub fn index(&self) -> Option<u64> {
        let p = self.field.p();
        self.coeffs.iter().rev().try_fold(0u64, |acc, &c| acc.checked_mul(p)?.checked_add(c))
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.ensure_same(&other.field)?;
        let p = self.field.p();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.ensure_same(&other.field)?;
        let p = self.field.p();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + p - b) % p).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.field.p();
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FieldElement { field: self.field.clone(), coeffs }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.ensure_same(&other.field)?;
        let p = self.field.p();
        let mut prod = poly_mul(&self.coeffs, &other.coeffs, p);
        poly_rem_monic(&mut prod, self.field.modulus(), p);
        prod.resize(self.field.k(), 0);
        Ok(FieldElement { field: self.field.clone(), coeffs: prod })
    }

    /// Square-and-multiply exponentiation; `0^0 = 1`.
    pub fn pow(&self, e: &BigUint) -> FieldElement {
        let mut acc = self.field.one();
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).expect("same field");
            if e.bit(i) {
                acc = acc.mul(self).expect("same field");
            }
        }
        acc
    }

    pub fn pow_u64(&self, e: u64) -> FieldElement {
        self.pow(&BigUint::from(e))
    }

    /// Multiplicative inverse via x^(q-2).
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivideByZero);
        }
        let e = self.field.order() - BigUint::from(2u32);
        Ok(self.pow(&e))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.ensure_same(&other.field)?;
        self.mul(&other.inv()?)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.k() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// Ring embedding F_{p^k} -> F_{p^{km}} sending t to a fixed root of the
/// small modulus inside the big field.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: FieldDesc,
    big: FieldDesc,
    root: FieldElement,
    /// powers root^0 .. root^{k-1}
    basis: Vec<FieldElement>,
}

impl Embedding {
    pub fn small(&self) -> &FieldDesc {
        &self.small
    }

    pub fn big(&self) -> &FieldDesc {
        &self.big
    }

    pub fn root(&self) -> &FieldElement {
        &self.root
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        self.small.ensure_same(x.field())?;
        let p = self.big.p();
        let mut acc = vec![0u64; self.big.k()];
        for (c, b) in x.coeffs().iter().zip(&self.basis) {
            for (dst, bc) in acc.iter_mut().zip(b.coeffs()) {
                *dst = (*dst + c * bc) % p;
            }
        }
        Ok(FieldElement { field: self.big.clone(), coeffs: acc })
    }
}

/// Finds the embedding determined by the first root (in enumeration order)
/// of `small`'s modulus inside `big`.
pub fn embed(small: &FieldDesc, big: &FieldDesc) -> Result<Embedding, FieldError> {
    if small.p() != big.p() || !big.k().is_multiple_of(small.k()) {
        return Err(FieldError::NoEmbedding { small: small.to_string(), big: big.to_string() });
    }
    let root = if small.k() == 1 {
        // F_p sits inside every extension the same way
        big.from_int(-(small.modulus()[0] as i64))
    } else {
        big.elements()?
            .find(|x| eval_univariate(small.modulus(), x).is_zero())
            .ok_or_else(|| FieldError::NoEmbedding { small: small.to_string(), big: big.to_string() })?
    };
    let mut basis = Vec::with_capacity(small.k());
    let mut pw = big.one();
    for _ in 0..small.k() {
        basis.push(pw.clone());
        pw = pw.mul(&root)?;
    }
    Ok(Embedding { small: small.clone(), big: big.clone(), root, basis })
}

/// Evaluates an F_p-coefficient polynomial (constant first) at `x`.
fn eval_univariate(coeffs: &[u64], x: &FieldElement) -> FieldElement {
    let f = x.field();
    coeffs
        .iter()
        .rev()
        .fold(f.zero(), |acc, &c| acc.mul(x).expect("same field").add(&f.from_int(c as i64)).expect("same field"))
}

// ---- F_p[x] helpers, constant term first ----

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; (a.len() + b.len()).saturating_sub(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y % p) % p;
        }
    }
    out
}

/// In-place remainder by a monic polynomial.
fn poly_rem_monic(a: &mut Vec<u64>, m: &[u64], p: u64) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().expect("nonempty");
        if lead == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for (i, &mc) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - lead * mc % p) % p;
        }
    }
    trim(a);
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    while r.len() > db {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - 1 - db;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bc % p) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// Ben-Or test: m is irreducible iff gcd(m, x^{p^i} - x) = 1 for i ≤ deg/2.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    let mut h = vec![0u64, 1];
    for _ in 0..k / 2 {
        h = powmod(&h, p, m, p);
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        if poly_gcd(m, &diff, p).len() > 1 {
            return false;
        }
    }
    true
}

fn powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = base.to_vec();
    poly_rem_monic(&mut b, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul(&acc, &b, p);
            poly_rem_monic(&mut acc, m, p);
        }
        b = poly_mul(&b, &b, p);
        poly_rem_monic(&mut b, m, p);
        e >>= 1;
    }
    acc
}

/// Number of elements of a field as `u64`, or `TooLarge`.
pub(crate) fn order_or_err(f: &FieldDesc) -> Result<u64, FieldError> {
    f.order_u64().ok_or_else(|| FieldError::TooLarge(f.order().clone()))
}

/// Smallest primitive element in enumeration order.
pub fn primitive_element(f: &FieldDesc) -> Result<FieldElement, FieldError> {
    let q = order_or_err(f)?;
    let mut n = q - 1;
    let mut primes = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            primes.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for i in 1..q {
        let g = f.element_at(i);
        if primes.iter().all(|&l| !g.pow_u64((q - 1) / l).is_one()) {
            return Ok(g);
        }
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

impl FieldElement {
    /// `x^q == x`; holds for every element.
    pub fn satisfies_frobenius(&self) -> bool {
        self.pow(self.field.order()) == *self
    }
}
