//! Greene's finite-field hypergeometric functions.
//!
//! Multiplicative characters are indexed by `j` in `[0, q-1)`, with
//! `chi_j(g^k) = zeta^(jk)` for the smallest primitive root `g` and
//! `zeta = exp(2 pi i / (q-1))`. Every character vanishes at zero, the
//! trivial one included.
//!
//! Two evaluation paths exist. The exact path ([`greene_2f1_phi`],
//! [`i_fq`]) works over the integers through the quadratic character. The
//! complex path ([`CharacterTable`]) evaluates the full character-sum
//! definition in double precision and serves as an oracle.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// Default absolute tolerance for complex comparisons.
pub const TOLERANCE: f64 = 1e-8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiplicativeCharacter {
    index: u32,
    order: u32,
}

impl MultiplicativeCharacter {
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_trivial(self) -> bool {
        self.index == 0
    }

    pub fn mul(self, other: Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        Self { index: (self.index + other.index) % self.order, order: self.order }
    }

    pub fn conj(self) -> Self {
        Self { index: (self.order - self.index) % self.order, order: self.order }
    }

    pub fn pow(self, k: u32) -> Self {
        Self { index: ((self.index as u64 * k as u64) % self.order as u64) as u32, order: self.order }
    }
}

impl std::fmt::Display for MultiplicativeCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "chi_{}", self.index)
    }
}

/// Precomputed roots of unity, discrete logs and additive character values
/// for one field. Immutable once built, so it can be shared across threads.
#[derive(Debug)]
pub struct CharacterTable {
    field: Field,
    order: u32,
    roots: Vec<Complex64>,
    log: Vec<u32>,
    additive: Vec<Complex64>,
    binomials: OnceLock<Vec<Complex64>>,
}

impl CharacterTable {
    pub fn new(field: &Field) -> CharacterTable {
        let q = field.q();
        let order = q - 1;
        let roots = (0..order)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / order as f64))
            .collect();
        let mut log = vec![0; q as usize];
        for x in field.elements().skip(1) {
            log[x.encoding() as usize] = field.discrete_log(x).expect("nonzero");
        }
        let p = field.p() as f64;
        let additive = field
            .elements()
            .map(|x| Complex64::from_polar(1.0, 2.0 * PI * field.absolute_trace(x) as f64 / p))
            .collect();
        CharacterTable { field: field.clone(), order, roots, log, additive, binomials: OnceLock::new() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn character(&self, j: u32) -> MultiplicativeCharacter {
        MultiplicativeCharacter { index: j % self.order, order: self.order }
    }

    pub fn characters(&self) -> impl Iterator<Item = MultiplicativeCharacter> + '_ {
        (0..self.order).map(|j| self.character(j))
    }

    pub fn trivial(&self) -> MultiplicativeCharacter {
        self.character(0)
    }

    /// The quadratic character `phi`.
    pub fn phi(&self) -> MultiplicativeCharacter {
        self.character(self.order / 2)
    }

    pub fn eval(&self, chi: MultiplicativeCharacter, x: FieldElement) -> Complex64 {
        if x.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let k = chi.index as u64 * self.log[x.encoding() as usize] as u64;
        self.roots[(k % self.order as u64) as usize]
    }

    /// `psi(x) = exp(2 pi i Tr(x) / p)`.
    pub fn additive(&self, x: FieldElement) -> Complex64 {
        self.additive[x.encoding() as usize]
    }

    /// `G(chi) = sum over x != 0 of chi(x) psi(x)`.
    pub fn gauss_sum(&self, chi: MultiplicativeCharacter) -> Complex64 {
        self.field.elements().skip(1).map(|x| self.eval(chi, x) * self.additive(x)).sum()
    }

    /// `J(A, B) = sum over t of A(t) B(1 - t)`.
    pub fn jacobi_sum(&self, a: MultiplicativeCharacter, b: MultiplicativeCharacter) -> Complex64 {
        let k = &self.field;
        k.elements().map(|t| self.eval(a, t) * self.eval(b, k.sub(k.one(), t))).sum()
    }

    /// Greene's binomial `(A choose B) = B(-1)/q * J(A, conj B)`.
    pub fn binomial(&self, a: MultiplicativeCharacter, b: MultiplicativeCharacter) -> Complex64 {
        let table = self.binomials.get_or_init(|| {
            let n = self.order as usize;
            let mut out = vec![Complex64::new(0.0, 0.0); n * n];
            for a in self.characters() {
                for b in self.characters() {
                    out[a.index as usize * n + b.index as usize] = self.binomial_direct(a, b);
                }
            }
            out
        });
        table[a.index as usize * self.order as usize + b.index as usize]
    }

    fn binomial_direct(&self, a: MultiplicativeCharacter, b: MultiplicativeCharacter) -> Complex64 {
        let minus_one = self.field.neg(self.field.one());
        self.eval(b, minus_one) * self.jacobi_sum(a, b.conj()) / self.field.q() as f64
    }

    /// `q/(q-1) * sum over chi of (A chi choose chi) (B chi choose C chi) chi(t)`.
    pub fn greene_2f1_full(
        &self,
        a: MultiplicativeCharacter,
        b: MultiplicativeCharacter,
        c: MultiplicativeCharacter,
        t: FieldElement,
    ) -> Complex64 {
        if t.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let sum: Complex64 = self
            .characters()
            .map(|chi| self.binomial(a.mul(chi), chi) * self.binomial(b.mul(chi), c.mul(chi)) * self.eval(chi, t))
            .sum();
        sum * (self.field.q() as f64 / self.order as f64)
    }

    /// Both sides of the quadratic transformation
    /// `2F1(A, B; A^2 | 4t/(1+t)^2) =
    ///   conj A(4) (phi B)(-1) G(A^2 conj B) G(phi conj A B) / (G(phi) G(A))
    ///   * B^2(1+t) * 2F1(phi conj A B, B; phi A | t^2)`,
    /// returning `|left - right|`.
    pub fn evans_greene_check(
        &self,
        a: MultiplicativeCharacter,
        b: MultiplicativeCharacter,
        t: FieldElement,
    ) -> Result<f64> {
        let (left, right) = self.evans_greene_sides(a, b, t)?;
        Ok((left - right).norm())
    }

    pub fn evans_greene_sides(
        &self,
        a: MultiplicativeCharacter,
        b: MultiplicativeCharacter,
        t: FieldElement,
    ) -> Result<(Complex64, Complex64)> {
        let k = &self.field;
        let phi = self.phi();
        let a2_bbar = a.pow(2).mul(b.conj());
        let phi_abar_b = phi.mul(a.conj()).mul(b);
        if a.is_trivial() || a2_bbar.is_trivial() || phi_abar_b.is_trivial() {
            return Err(Error::PreconditionViolated("A, A^2 conj(B) and phi conj(A) B must be nontrivial"));
        }
        let one_plus_t = k.add(k.one(), t);
        if one_plus_t.is_zero() {
            return Err(Error::PreconditionViolated("t = -1"));
        }
        let arg = k.div(k.mul(k.from_int(4), t), k.square(one_plus_t))?;
        let left = self.greene_2f1_full(a, b, a.pow(2), arg);
        let minus_one = k.neg(k.one());
        let factor = self.eval(a.conj(), k.from_int(4)) * self.eval(phi.mul(b), minus_one) * self.gauss_sum(a2_bbar)
            * self.gauss_sum(phi_abar_b)
            / (self.gauss_sum(phi) * self.gauss_sum(a));
        let right =
            factor * self.eval(b.pow(2), one_plus_t) * self.greene_2f1_full(phi_abar_b, b, phi.mul(a), k.square(t));
        Ok((left, right))
    }
}

/// Exact value `num / den` of `2F1(phi, phi; eps | lambda)`, together with
/// the character sum `s = sum over x of phi(x(x-1)(x-lambda))`.
///
/// The value is `phi(-1) * s / q`, so `den` is always `q`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactTwoF1 {
    pub s: i64,
    pub num: i64,
    pub den: u64,
}

impl ExactTwoF1 {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for ExactTwoF1 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `sum over x of phi(x) phi(x - 1) phi(x - mu)` in integer arithmetic.
fn legendre_sum(field: &Field, mu: FieldElement) -> i64 {
    field
        .elements()
        .map(|x| field.phi(field.mul(field.mul(x, field.sub(x, field.one())), field.sub(x, mu))) as i64)
        .sum()
}

pub fn greene_2f1_phi(field: &Field, lambda: FieldElement) -> ExactTwoF1 {
    let s = legendre_sum(field, lambda);
    let phi_m1 = field.phi(field.neg(field.one())) as i64;
    ExactTwoF1 { s, num: phi_m1 * s, den: field.q() as u64 }
}

/// `I(a, b) = sum over x of phi(x) phi(x - 1) phi(x - (1 - b^2/a^2))`.
pub fn i_fq(field: &Field, a: FieldElement, b: FieldElement) -> Result<i64> {
    if a.is_zero() || b.is_zero() || a == b || a == field.neg(b) {
        return Err(Error::InvalidPair { a: a.encoding(), b: b.encoding() });
    }
    Ok(legendre_sum(field, i_fq_argument(field, a, b)))
}

/// `1 - b^2/a^2`.
pub fn i_fq_argument(field: &Field, a: FieldElement, b: FieldElement) -> FieldElement {
    field.sub(field.one(), field.div(field.square(b), field.square(a)).expect("a != 0"))
}
