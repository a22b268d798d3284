//! Arithmetic in `F_q` for `q = p^m = 3 (mod 4)`.
//!
//! Elements are stored by their canonical integer encoding
//! `enc = c_0 + c_1 p + ... + c_{m-1} p^{m-1}`, where `c_i` multiplies `x^i`
//! in `F_p[x] / (f)`. The modulus `f` is the first monic irreducible
//! polynomial of degree `m` in ascending order of the same encoding, so two
//! runs with the same `(p, m)` always agree on every encoding.
//!
//! Multiplication goes through discrete exp/log tables built once from the
//! primitive root; [`Field::mul_reference`] multiplies polynomials directly
//! and is what the tables are built from.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};

/// Largest field order accepted by [`Field::new`].
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// An element of some [`Field`], identified by its canonical encoding.
///
/// Elements carry no reference to their field; mixing elements of
/// different fields is a logic error that the arithmetic does not detect.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn encoding(self) -> u32 {
        self.0
    }

    /// Wraps an encoding without checking it against a field order.
    pub(crate) const fn raw(enc: u32) -> FieldElement {
        FieldElement(enc)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Serializable description of a field: `{p, m, modulus}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldParams {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: FieldElement,
    inv2: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// The finite field `F_q`. Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p())
            .field("m", &self.m())
            .field("modulus", &self.modulus())
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.p() == other.p() && self.m() == other.m() && self.modulus() == other.modulus())
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m() == 1 {
            write!(f, "F_{}", self.q())
        } else {
            write!(f, "F_{}^{} (modulus {:?})", self.p(), self.m(), self.modulus())
        }
    }
}

fn checked_order(p: u32, m: u32) -> Result<u32> {
    if !arith::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if m == 0 {
        return Err(Error::InvalidInput("field degree must be positive".into()));
    }
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q.saturating_mul(p as u64);
        if q > MAX_FIELD_ORDER {
            return Err(Error::TooLarge { what: "q", value: q, max: MAX_FIELD_ORDER });
        }
    }
    if q % 4 != 3 {
        return Err(Error::WrongResidueClass(q));
    }
    Ok(q as u32)
}

impl Field {
    /// Builds `F_{p^m}` with the deterministic modulus.
    pub fn new(p: u32, m: u32) -> Result<Field> {
        let q = checked_order(p, m)?;
        let modulus = if m == 1 { vec![0, 1] } else { first_irreducible(p, m as usize) };
        Ok(Self::build(p, m, q, modulus))
    }

    /// Builds `F_q` from its order, which must be a prime power.
    pub fn from_order(q: u64) -> Result<Field> {
        if q > MAX_FIELD_ORDER {
            return Err(Error::TooLarge { what: "q", value: q, max: MAX_FIELD_ORDER });
        }
        let (p, m) = arith::prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Field::new(p as u32, m)
    }

    /// Builds `F_{p^m}` with a caller-chosen monic irreducible modulus,
    /// given as `m + 1` coefficients `c_0..c_m`.
    pub fn with_modulus(p: u32, m: u32, modulus: &[u32]) -> Result<Field> {
        let q = checked_order(p, m)?;
        let ok = modulus.len() == m as usize + 1
            && modulus[m as usize] == 1
            && modulus.iter().all(|&c| c < p)
            && (m == 1 || is_irreducible(modulus, p));
        if !ok {
            return Err(Error::BadModulus(modulus.to_vec()));
        }
        Ok(Self::build(p, m, q, modulus.to_vec()))
    }

    fn build(p: u32, m: u32, q: u32, modulus: Vec<u32>) -> Field {
        let mut inner = Inner {
            p,
            m,
            q,
            modulus,
            generator: FieldElement::ONE,
            inv2: FieldElement::ONE,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let order = (q - 1) as u64;
        let ell = arith::prime_divisors(order);
        let generator = (1..q)
            .map(FieldElement)
            .find(|&g| ell.iter().all(|&l| pow_reference(&inner, g, order / l) != FieldElement::ONE))
            .expect("F_q^x is cyclic");
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = FieldElement::ONE;
        for k in 0..q - 1 {
            exp.push(x.0);
            log[x.0 as usize] = k;
            x = mul_reference(&inner, x, generator);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        // p >= 3, so the integer 2 has encoding 2.
        let n = q - 1;
        inner.inv2 = FieldElement(exp[((n - log[2]) % n) as usize]);
        inner.generator = generator;
        inner.exp = exp;
        inner.log = log;
        Field { inner: Arc::new(inner) }
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn m(&self) -> u32 {
        self.inner.m
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Coefficients `c_0..c_m` of the modulus; `[0, 1]` for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn params(&self) -> FieldParams {
        FieldParams { p: self.p(), m: self.m(), modulus: self.modulus().to_vec() }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn elem(&self, encoding: u64) -> Result<FieldElement> {
        if encoding < self.q() as u64 {
            Ok(FieldElement(encoding as u32))
        } else {
            Err(Error::BadEncoding(encoding))
        }
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.m() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::InvalidInput(format!("bad coefficient vector {coeffs:?}")));
        }
        let mut enc = 0u32;
        for &c in coeffs.iter().rev() {
            enc = enc * self.p() + c;
        }
        Ok(FieldElement(enc))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        decode(x.0, self.p(), self.m())
    }

    /// All `q` elements in ascending encoding.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q()).map(FieldElement)
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let p = self.p();
        if self.m() == 1 {
            let s = x.0 + y.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        let (mut a, mut b) = (x.0, y.0);
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m() {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        let p = self.p();
        if self.m() == 1 {
            return FieldElement(if x.0 == 0 { 0 } else { p - x.0 });
        }
        let mut a = x.0;
        let (mut out, mut place) = (0, 1);
        for _ in 0..self.m() {
            let d = (p - a % p) % p;
            out += d * place;
            place *= p;
            a /= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.q() - 1;
        let s = self.inner.log[x.0 as usize] + self.inner.log[y.0 as usize];
        FieldElement(self.inner.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Multiplication by polynomial arithmetic modulo the modulus, bypassing
    /// the log tables.
    pub fn mul_reference(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        mul_reference(&self.inner, x, y)
    }

    pub fn square(&self, x: FieldElement) -> FieldElement {
        self.mul(x, x)
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q() - 1;
        let l = self.inner.log[x.0 as usize];
        Ok(FieldElement(self.inner.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x / 2`, as multiplication by the inverse of `1 + 1`.
    pub fn half(&self, x: FieldElement) -> FieldElement {
        self.mul(x, self.inner.inv2)
    }

    /// Square-and-multiply exponentiation; `pow(0, 0) = 1`.
    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut acc = FieldElement::ONE;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character: `0` at zero, otherwise `x^((q-1)/2)` as `±1`.
    pub fn phi(&self, x: FieldElement) -> i32 {
        if x.0 == 0 {
            0
        } else if self.inner.log[x.0 as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(&self, x: FieldElement) -> bool {
        self.phi(x) >= 0
    }

    /// The root `x^((q+1)/4)`; the other root is its negative.
    pub fn canonical_sqrt(&self, x: FieldElement) -> Result<FieldElement> {
        match self.phi(x) {
            0 => Ok(FieldElement::ZERO),
            -1 => Err(Error::NotASquare),
            _ => {
                let n = (self.q() - 1) as u64;
                let e = (self.q() as u64 + 1) / 4;
                let l = self.inner.log[x.0 as usize] as u64;
                Ok(FieldElement(self.inner.exp[(l * e % n) as usize]))
            }
        }
    }

    /// Smallest-encoding generator of `F_q^x`.
    pub fn primitive_root(&self) -> FieldElement {
        self.inner.generator
    }

    /// `k` with `g^k = x` for the primitive root `g`; `None` at zero.
    pub fn discrete_log(&self, x: FieldElement) -> Option<u32> {
        (x.0 != 0).then(|| self.inner.log[x.0 as usize])
    }

    /// `g^k` for the primitive root `g`.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.inner.exp[(k % (self.q() as u64 - 1)) as usize])
    }

    /// `x + x^p + ... + x^(p^(m-1))`, which lies in the prime field.
    pub fn absolute_trace(&self, x: FieldElement) -> u32 {
        let mut acc = FieldElement::ZERO;
        let mut frob = x;
        for _ in 0..self.m() {
            acc = self.add(acc, frob);
            frob = self.pow(frob, self.p() as u64);
        }
        debug_assert!(acc.0 < self.p(), "trace left the prime field");
        acc.0
    }
}

fn decode(mut enc: u32, p: u32, m: u32) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let c = enc % p;
            enc /= p;
            c
        })
        .collect()
}

fn mul_reference(inner: &Inner, x: FieldElement, y: FieldElement) -> FieldElement {
    let (p, m) = (inner.p as u64, inner.m as usize);
    if m == 1 {
        return FieldElement((x.0 as u64 * y.0 as u64 % p) as u32);
    }
    let a = decode(x.0, inner.p, inner.m);
    let b = decode(y.0, inner.p, inner.m);
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai as u64 * bj as u64) % p;
        }
    }
    // x^m = -(c_0 + ... + c_{m-1} x^{m-1})
    for k in (m..prod.len()).rev() {
        let top = prod[k];
        if top == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &c) in inner.modulus[..m].iter().enumerate() {
            let idx = k - m + i;
            prod[idx] = (prod[idx] + (p - top) * c as u64) % p;
        }
    }
    let mut enc = 0u64;
    for &c in prod[..m].iter().rev() {
        enc = enc * p + c;
    }
    FieldElement(enc as u32)
}

fn pow_reference(inner: &Inner, x: FieldElement, mut e: u64) -> FieldElement {
    let mut acc = FieldElement::ONE;
    let mut base = x;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_reference(inner, acc, base);
        }
        base = mul_reference(inner, base, base);
        e >>= 1;
    }
    acc
}

// Dense polynomials over Z/p, lowest coefficient first, no trailing zeros.

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let lead_inv = arith::pow_mod(*f.last().unwrap(), p - 2, p);
    while r.len() >= f.len() {
        let shift = r.len() - f.len();
        let factor = r.last().unwrap() * lead_inv % p;
        for (i, &c) in f.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - factor) * c % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or: `f` of degree `m` is irreducible iff `gcd(f, x^(p^d) - x) = 1`
/// for every `d <= m / 2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let p = p as u64;
    let f: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
    let m = f.len() - 1;
    let x = vec![0u64, 1];
    let mut frob = x.clone();
    for _ in 1..=m / 2 {
        frob = poly_powmod(&frob, p, &f, p);
        let mut diff = frob.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd(&f, &trim(diff), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible degree-`m` polynomial in ascending encoding of
/// its coefficient vector.
fn first_irreducible(p: u32, m: usize) -> Vec<u32> {
    let count = (p as u64).pow(m as u32);
    for low in 0..count {
        let mut coeffs = decode(low as u32, p, m as u32);
        coeffs.push(1);
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
