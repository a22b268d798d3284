//! Class numbers of binary quadratic forms and the class-number count of
//! `j`-invariants in jellyfish trace families.
//!
//! `H(N)` is computed twice: once by enumerating reduced forms of
//! discriminant `-N` with automorphism weights, once from `h(D)` of the
//! fundamental discriminant via the conductor sum. The two never share code
//! beyond `reduced_forms`.

use num_integer::Integer;
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::legendre::annotate_swarm;
use crate::swarm::Swarm;

/// Largest `n` accepted by [`r3`].
pub const R3_MAX: u64 = 10_000_000;

/// `a x^2 + b xy + c y^2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Six times the weight `1 / |Aut|` relative to `+-1`: forms proportional
    /// to `x^2 + y^2` count 1/2, those proportional to `x^2 + xy + y^2`
    /// count 1/3.
    fn weight6(&self) -> u64 {
        if self.b == 0 && self.a == self.c {
            3
        } else if self.a == self.b && self.b == self.c {
            2
        } else {
            6
        }
    }
}

impl std::fmt::Display for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_discriminant(d: i64) -> Result<()> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        Err(Error::BadDiscriminant(d))
    } else {
        Ok(())
    }
}

/// Reduced forms `|b| <= a <= c` (with `b >= 0` if `|b| = a` or `a = c`) of
/// discriminant `d`, sorted by `(a, b, c)`. One per `SL_2(Z)` class.
pub fn reduced_forms(d: i64, primitive_only: bool) -> Result<Vec<QuadForm>> {
    check_discriminant(d)?;
    let n = -d;
    let mut out = Vec::new();
    // a <= c forces 3a^2 <= |D|
    let mut a = 1;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            let f = QuadForm { a, b, c };
            if !primitive_only || f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    Ok(out)
}

/// `D = 1 (mod 4)` squarefree, or `D = 4k` with `k = 2, 3 (mod 4)` squarefree.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let n = d.unsigned_abs();
    match d.rem_euclid(4) {
        1 => arith::is_squarefree(n),
        0 => {
            let k = d / 4;
            matches!(k.rem_euclid(4), 2 | 3) && arith::is_squarefree(k.unsigned_abs())
        }
        _ => false,
    }
}

/// Gauss's class number: primitive reduced forms of fundamental
/// discriminant `d`.
pub fn gauss_h(d: i64) -> Result<u64> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(reduced_forms(d, true)?.len() as u64)
}

/// Exact nonnegative rational in lowest terms; the denominator divides 6.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HurwitzValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl HurwitzValue {
    pub fn new(numerator: u64, denominator: u64) -> HurwitzValue {
        let g = numerator.gcd(&denominator);
        HurwitzValue { numerator: numerator / g, denominator: denominator / g }
    }

    pub fn is_integer(&self) -> bool {
        self.denominator == 1
    }

    pub fn as_integer(&self) -> Option<u64> {
        self.is_integer().then_some(self.numerator)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl std::fmt::Display for HurwitzValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

fn check_residue(n: u64) -> Result<()> {
    if n == 0 || matches!(n % 4, 1 | 2) {
        Err(Error::BadResidue(n))
    } else {
        Ok(())
    }
}

/// `H(N)` by weighted enumeration of all reduced forms of discriminant `-N`.
pub fn hurwitz_h(n: u64) -> Result<HurwitzValue> {
    check_residue(n)?;
    let sixths: u64 = reduced_forms(-(n as i64), false)?.iter().map(QuadForm::weight6).sum();
    Ok(HurwitzValue::new(sixths, 6))
}

/// `-N = D f^2` with `D` fundamental.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantFactorization {
    pub d: i64,
    pub f: u64,
    /// Half the number of units of the order of discriminant `D`.
    pub w: u64,
}

pub fn factor_discriminant(n: u64) -> Result<DiscriminantFactorization> {
    check_residue(n)?;
    // the largest f with -N/f^2 still a discriminant leaves D fundamental
    let f = arith::divisors(n)
        .into_iter()
        .filter(|&f| n % (f * f) == 0 && matches!((n / (f * f)) % 4, 0 | 3))
        .max()
        .expect("f = 1 qualifies");
    let d = -((n / (f * f)) as i64);
    if !is_fundamental(d) {
        return Err(Error::Invariant(format!("-{n} / {f}^2 = {d} is not fundamental")));
    }
    let w = match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    Ok(DiscriminantFactorization { d, f, w })
}

/// `H(N) = h(D)/w(D) * sum over d | f of mu(d) (D/d) sigma_1(f/d)`.
pub fn hurwitz_h_formula(n: u64) -> Result<HurwitzValue> {
    let DiscriminantFactorization { d, f, w } = factor_discriminant(n)?;
    let h = gauss_h(d)? as i64;
    let sum: i64 = arith::divisors(f)
        .into_iter()
        .map(|e| arith::mobius(e) as i64 * arith::kronecker(d, e as i64) as i64 * arith::sigma1(f / e) as i64)
        .sum();
    let total = h * sum;
    if total < 0 {
        return Err(Error::Invariant(format!("negative class number sum for N = {n}")));
    }
    Ok(HurwitzValue::new(total as u64, w))
}

/// `#{(x, y, z) in Z^3 : x^2 + y^2 + z^2 = n}` by exhaustion.
pub fn r3(n: u64) -> Result<u64> {
    if n > R3_MAX {
        return Err(Error::TooLarge { what: "r3 argument", value: n, max: R3_MAX });
    }
    let r = arith::isqrt(n);
    let mut count = 0;
    for x in 0..=r {
        for y in 0..=arith::isqrt(n - x * x) {
            let rest = n - x * x - y * y;
            let z = arith::isqrt(rest);
            if z * z == rest {
                // signs: each nonzero coordinate doubles the count
                count += [x, y, z].iter().map(|&v| if v == 0 { 1 } else { 2 }).product::<u64>();
            }
        }
    }
    Ok(count)
}

/// Number of distinct `j`-invariants among curves attached to the jellyfish
/// of trace `s`. Zero when no jellyfish has that trace.
pub fn m_fq(swarm: &Swarm, s: i64) -> Result<usize> {
    let mut js = std::collections::BTreeSet::new();
    for jf in swarm.jellyfish() {
        let ann = jf.annotation.as_ref().ok_or(Error::NotAnnotated)?;
        if ann.trace == s {
            js.extend(ann.curves.iter().map(|c| c.j));
        }
    }
    Ok(js.len())
}

/// Nonzero `s` with `s^2 <= 4q` and `s = q + 1 (mod 8)`, ascending. These are
/// exactly the traces for which `(4q - s^2)/4 = 3 (mod 4)`.
pub fn valid_traces(q: u64) -> Vec<i64> {
    let bound = arith::isqrt(4 * q) as i64;
    (-bound..=bound).filter(|&s| s != 0 && (s - (q as i64 + 1)).rem_euclid(8) == 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchoofRow {
    pub s: i64,
    /// `(4q - s^2) / 4`.
    pub n: u64,
    pub h: HurwitzValue,
    pub m: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchoofReport {
    pub q: u64,
    pub rows: Vec<SchoofRow>,
    /// `s = 0` satisfies the congruence but lies outside the identity; it is
    /// skipped and flagged here.
    pub skipped_zero: bool,
}

impl SchoofReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

/// Builds and annotates the swarm of `F_q`, then compares `H((4q - s^2)/4)`
/// with `M(s)` for every valid trace.
pub fn verify_schoof_identity(q: u64) -> Result<SchoofReport> {
    let field = Field::from_order(q)?;
    let mut swarm = Swarm::build(&field)?;
    annotate_swarm(&mut swarm)?;
    verify_schoof_identity_on(&swarm)
}

/// Same as [`verify_schoof_identity`] for an already annotated swarm.
pub fn verify_schoof_identity_on(swarm: &Swarm) -> Result<SchoofReport> {
    let q = swarm.field().q() as u64;
    let rows = valid_traces(q)
        .into_iter()
        .map(|s| {
            let n = (4 * q - (s * s) as u64) / 4;
            let h = hurwitz_h(n)?;
            let m = m_fq(swarm, s)?;
            let ok = h.as_integer() == Some(m as u64);
            Ok(SchoofRow { s, n, h, m, ok })
        })
        .collect::<Result<_>>()?;
    Ok(SchoofReport { q, rows, skipped_zero: (q + 1) % 8 == 0 })
}
